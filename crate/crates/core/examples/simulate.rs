//! Pseudo-spectral run of v_t = 3 v v_x against the characteristics solution,
//! with conservation drifts.
use hydrobracket::bracket::{CanonicalPair, ConstantBracket};
use hydrobracket::expr::{field_names, int, parse_expr};
use hydrobracket::hierarchy::flow_t1;
use hydrobracket::numsim::{run, CompiledFlow, Densities, FieldState, Grid, RunConfig, Spectral};

fn main() -> hydrobracket::Result<()> {
    let p = CanonicalPair::new(ConstantBracket::identity(1), int(0), vec![parse_expr("u1^2/2", &field_names(1))?])?;
    let grid = Grid::new(256, 2.0 * std::f64::consts::PI)?;
    let spectral = Spectral::new(&grid);
    let initial = FieldState::from_expressions(&grid, &["0.1*sin(x)"])?;
    let flow = CompiledFlow::from_flow(&flow_t1(&p)?);
    let out = run(&flow, &Densities::from_pair(&p)?, &spectral, &initial, &RunConfig::new(1e-3, 0.2))?;

    let t = out.final_state.t;
    let err = grid
        .nodes()
        .iter()
        .zip(&out.final_state.fields[0])
        .map(|(&x, &v)| {
            let mut w = 0.1 * x.sin();
            for _ in 0..100 {
                w = 0.1 * (x + 3.0 * w * t).sin();
            }
            (v - w).abs()
        })
        .fold(0.0, f64::max);
    println!("status {:?} at t = {t}, max error vs characteristics {err:.2e}", out.status);
    for (name, d) in out.drifts() {
        println!("drift {name}: {d:.2e}");
    }
    Ok(())
}
