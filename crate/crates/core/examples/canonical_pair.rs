//! Compatible pairs generated by a vector of potentials: the bracket, the
//! equations on the potentials and their agreement with the Poisson check.
use hydrobracket::bracket::{build_canonical, check_canonical_equations, equivalence_audit, CanonicalPair, ConstantBracket};
use hydrobracket::expr::{field_names, int, parse_expr};

fn pair(k: i64, h: &[&str]) -> hydrobracket::Result<CanonicalPair> {
    let names = field_names(2);
    let h = h.iter().map(|s| parse_expr(s, &names)).collect::<hydrobracket::Result<Vec<_>>>()?;
    CanonicalPair::new(ConstantBracket::identity(2), int(k), h)
}

fn main() -> hydrobracket::Result<()> {
    let names = field_names(2);
    let p = pair(1, &["u1^2/2 + u2^2/2", "u1"])?;
    let b = build_canonical(&p);
    for i in 0..2 {
        for j in 0..2 {
            println!("g^{}{} = {}", i + 1, j + 1, b.g[[i, j]].display(&names));
        }
    }
    println!("{}\n", check_canonical_equations(&p)?);

    for (k, h) in [(1, ["u1^2/2", "u2^2/2"]), (0, ["u1^2/2", "u2^2/2"]), (7, ["3*u1 - u2", "u1 + u2/2"])] {
        let audit = equivalence_audit(&pair(k, &h)?)?;
        println!("K = {k}, H = {h:?}: Poisson {}", audit.is_poisson());
    }
    Ok(())
}
