//! The nonlocal operator applied on a grid, compared with the first flow.
use hydrobracket::bracket::{CanonicalPair, ConstantBracket};
use hydrobracket::expr::{field_names, int, parse_expr, CompiledExpr};
use hydrobracket::hierarchy::flow_t1;
use num_traits::ToPrimitive;
use hydrobracket::numsim::{apply_p1_numeric, CompiledBracket, CompiledFlow, FieldState, Grid, Spectral};

fn main() -> hydrobracket::Result<()> {
    let h = ["u1^2/2 + u2^2/2", "u1"]
        .iter()
        .map(|s| parse_expr(s, &field_names(2)))
        .collect::<hydrobracket::Result<Vec<_>>>()?;
    let p = CanonicalPair::new(ConstantBracket::identity(2), int(1), h)?;
    let grid = Grid::new(256, 2.0 * std::f64::consts::PI)?;
    let spectral = Spectral::new(&grid);
    let state = FieldState::from_expressions(&grid, &["0.2*sin(x) + 0.05", "0.1*cos(2*x)"])?;
    // xi = eta v is the gradient of the momentum density
    let xi = state.fields.clone();
    let applied = apply_p1_numeric(&CompiledBracket::from_pair(&p), &spectral, &state, &xi)?;
    let flow = CompiledFlow::from_flow(&flow_t1(&p)?).rhs(&spectral, &state);
    let momentum = CompiledExpr::new(&p.eta.momentum_density());
    let mean: f64 = (0..grid.points()).map(|m| momentum.eval(&state.at(m))).sum::<f64>() / grid.points() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let vx = spectral.dx(&state.fields[i]);
        for m in 0..grid.points() {
            worst = worst.max((applied[i][m] - (flow[i][m] - p.k.to_f64().unwrap_or(f64::NAN) * mean * vx[m])).abs());
        }
    }
    println!("max |P1(eta v) - (V1 v_x - K mean(S0) v_x)| = {worst:.2e}");
    Ok(())
}
