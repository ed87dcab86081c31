//! Deciding whether a nonlocal bracket of hydrodynamic type is Poisson.
use hydrobracket::bracket::{check_poisson, ConstantBracket, HydroBracket};
use hydrobracket::expr::{int, Expr};
use hydrobracket::geometry::canonical_metric;

fn main() -> hydrobracket::Result<()> {
    let eta = ConstantBracket::diagonal(&[int(1), int(-1)])?;
    println!("constant bracket:\n{}\n", check_poisson(&eta.as_bracket())?);

    let k = int(2);
    let g = canonical_metric(&[int(1), int(3)], &k)?.metric.contra;
    let good = HydroBracket::from_metric(g.clone(), k.clone())?;
    println!("constant-curvature metric:\n{}\n", check_poisson(&good)?);

    let mut bent = g;
    bent[[0, 0]] = &bent[[0, 0]] + &(Expr::var(0) * Expr::var(1));
    let bad = HydroBracket::from_metric(bent, k)?;
    println!("perturbed metric:\n{}", check_poisson(&bad)?);
    Ok(())
}
