//! The bi-Hamiltonian hierarchy of a compatible pair.
use hydrobracket::bracket::{CanonicalPair, ConstantBracket};
use hydrobracket::expr::{field_names, flow_names, int, parse_expr};
use hydrobracket::hierarchy::{bihamiltonian_check, commute_check, flow_t2, hierarchy};

fn main() -> hydrobracket::Result<()> {
    let h = ["u1^2/2 + u2^2/2", "u1"]
        .iter()
        .map(|s| parse_expr(s, &field_names(2)))
        .collect::<hydrobracket::Result<Vec<_>>>()?;
    let p = CanonicalPair::new(ConstantBracket::identity(2), int(1), h)?;
    let gauge = p.eta.lower_index(&p.h_at_origin()?);
    let flows = hierarchy(&p, 2, &[gauge])?;
    let names = flow_names(2);
    for (n, f) in flows.iter().enumerate() {
        println!("level {n}: F = ({}, {})", f.f[0].display(&names), f.f[1].display(&names));
    }
    println!("closed-form second flow agrees: {}", flow_t2(&p)? == flows[2]);
    let bh = bihamiltonian_check(&p, &flows[1], &flows[0].s)?;
    println!("first flow bi-Hamiltonian: {}", bh.passed());
    println!("t1, t2 commute: {}", commute_check(&flows[1].v, &flows[2].v)?.passed());

    let scalar = CanonicalPair::new(ConstantBracket::identity(1), int(0), vec![parse_expr("u1^2/2", &field_names(1))?])?;
    for (n, f) in hierarchy(&scalar, 3, &[])?.iter().enumerate() {
        println!("scalar level {n}: V = {}", f.v[[0, 0]].display(&flow_names(1)));
    }
    Ok(())
}
