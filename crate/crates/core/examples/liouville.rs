//! Recovering the Liouville function and the potentials of a bracket, and
//! involution of the annihilators and the momentum.
use hydrobracket::bracket::{
    build_canonical, involution_report, special_liouville, CanonicalPair, ConstantBracket,
};
use hydrobracket::expr::{field_names, int, parse_expr, Expr};

fn main() -> hydrobracket::Result<()> {
    let names = field_names(2);
    let eta = ConstantBracket::diagonal(&[int(1), int(-1)])?;
    let h = ["u1^2*u2 + u2^3/3", "u1^3/3 + u1*u2^2"]
        .iter()
        .map(|s| parse_expr(s, &names))
        .collect::<hydrobracket::Result<Vec<_>>>()?;
    let b = build_canonical(&CanonicalPair::new(eta.clone(), int(0), h)?);
    let data = special_liouville(&b, &eta)?;
    for i in 0..2 {
        for j in 0..2 {
            println!("Phi^{}{} = {}", i + 1, j + 1, data.phi[[i, j]].display(&names));
        }
    }
    for (j, e) in data.h.iter().flatten().enumerate() {
        println!("H^{} = {}", j + 1, e.display(&names));
    }
    let dens = vec![Expr::var(0), Expr::var(1), eta.momentum_density()];
    for (a, c, ok) in involution_report(&b, &dens)? {
        println!("{{d{a}, d{c}}} in involution: {ok}");
    }
    Ok(())
}
