//! Numerical commutation defect of two flows under halving of the flow time.
use hydrobracket::bracket::{CanonicalPair, ConstantBracket};
use hydrobracket::expr::{field_names, int, parse_expr, rat, Expr};
use hydrobracket::hierarchy::hierarchy;
use hydrobracket::numsim::{commute_check_numeric, CompiledFlow, FieldState, Grid, Spectral};

fn main() -> hydrobracket::Result<()> {
    let h = ["u1^2/2 + u2^2/2", "u1"]
        .iter()
        .map(|s| parse_expr(s, &field_names(2)))
        .collect::<hydrobracket::Result<Vec<_>>>()?;
    let p = CanonicalPair::new(ConstantBracket::identity(2), int(1), h)?;
    let flows = hierarchy(&p, 2, &[])?;
    let grid = Grid::new(64, 2.0 * std::f64::consts::PI)?;
    let spectral = Spectral::new(&grid);
    let state = FieldState::from_expressions(&grid, &["0.3*sin(x)", "0.2*cos(x) + 0.1"])?;
    let a = CompiledFlow::from_flow(&flows[1]);
    let mut perturbed = flows[2].v.clone();
    perturbed[[0, 1]] = &perturbed[[0, 1]] + &Expr::constant(rat(1, 10));
    for (label, b) in [("t2", CompiledFlow::from_flow(&flows[2])), ("perturbed t2", CompiledFlow::new(&perturbed))] {
        let d1 = commute_check_numeric(&a, &b, &spectral, &state, 2e-2)?;
        let d2 = commute_check_numeric(&a, &b, &spectral, &state, 1e-2)?;
        println!("t1 vs {label}: defect {d1:.2e} -> {d2:.2e}, ratio {:.1}", d1 / d2);
    }
    Ok(())
}
