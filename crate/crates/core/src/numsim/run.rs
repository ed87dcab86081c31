use std::io::Write;

use serde::Serialize;

use super::{CompiledFlow, FieldState, Grid, Spectral};
use crate::bracket::CanonicalPair;
use crate::expr::{CompiledExpr, Expr};
use crate::hierarchy::flow_t1;
use crate::{Error, Result};

/// Conserved quantities and monitors of one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    /// spatial means of v^i
    pub annihilators: Vec<f64>,
    pub momentum: f64,
    pub h1: f64,
    pub h2: f64,
    pub max_vx: f64,
    pub tail: f64,
}

/// Densities of the momentum/H₁ and of H₂ for a pair.
#[derive(Clone, Debug)]
pub struct Densities {
    momentum: CompiledExpr,
    h2: CompiledExpr,
}

impl Densities {
    pub fn new(momentum: &Expr, h2: &Expr) -> Self {
        Densities { momentum: CompiledExpr::new(momentum), h2: CompiledExpr::new(h2) }
    }

    /// ½η_{jl}v^jv^l and the density of the first flow's Hamiltonian.
    pub fn from_pair(p: &CanonicalPair) -> Result<Self> {
        Ok(Densities::new(&p.eta.momentum_density(), &flow_t1(p)?.s))
    }

    fn integrals(&self, grid: &Grid, state: &FieldState) -> [(f64, f64); 2] {
        let dx = grid.spacing();
        let mut out = [(0.0, 0.0); 2];
        for m in 0..state.points() {
            let p = state.at(m);
            for (slot, e) in out.iter_mut().zip([&self.momentum, &self.h2]) {
                let v = e.eval(&p);
                slot.0 += v * dx;
                slot.1 += v.abs() * dx;
            }
        }
        out
    }
}

pub fn diagnostics(spectral: &Spectral, densities: &Densities, state: &FieldState) -> Diagnostics {
    let grid = spectral.grid();
    let [(momentum, _), (h2, _)] = densities.integrals(grid, state);
    let max_vx = state
        .fields
        .iter()
        .flat_map(|f| spectral.dx(f))
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let tail = state.fields.iter().map(|f| spectral.tail_fraction(f)).fold(0.0, f64::max);
    Diagnostics {
        t: state.t,
        annihilators: state.fields.iter().map(|f| grid.mean(f)).collect(),
        momentum,
        h1: momentum,
        h2,
        max_vx,
        tail,
    }
}

/// One classical RK4 step of v_t = V(v)v_x.
pub fn step_rk4(flow: &CompiledFlow, spectral: &Spectral, state: &FieldState, dt: f64, dealias: bool) -> Result<FieldState> {
    if !(dt > 0.0) {
        return Err(Error::Input(format!("time step must be positive, got {dt}")));
    }
    if flow.dim() != state.dim() {
        return Err(Error::Dimension("flow and state differ in N".into()));
    }
    let rhs = |s: &FieldState| {
        let r = flow.rhs(spectral, s);
        if dealias {
            r.iter().map(|c| spectral.dealias(c)).collect()
        } else {
            r
        }
    };
    let shifted = |k: &[Vec<f64>], h: f64| FieldState {
        t: state.t + h,
        fields: state
            .fields
            .iter()
            .zip(k)
            .map(|(f, d)| f.iter().zip(d).map(|(a, b)| a + h * b).collect())
            .collect(),
    };
    let k1 = rhs(state);
    let k2 = rhs(&shifted(&k1, dt / 2.0));
    let k3 = rhs(&shifted(&k2, dt / 2.0));
    let k4 = rhs(&shifted(&k3, dt));
    let fields = (0..state.dim())
        .map(|i| {
            (0..state.points())
                .map(|m| state.fields[i][m] + dt / 6.0 * (k1[i][m] + 2.0 * k2[i][m] + 2.0 * k3[i][m] + k4[i][m]))
                .collect()
        })
        .collect();
    let next = FieldState { t: state.t + dt, fields };
    next.check_finite()?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub t_end: f64,
    /// times at which to keep a copy of the state (nearest step)
    pub snapshots: Vec<f64>,
    pub dealias: bool,
    /// stop when max|v_x| exceeds this multiple of its initial value
    pub breaking_factor: f64,
    pub tail_threshold: f64,
}

impl RunConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        RunConfig { dt, t_end, snapshots: Vec::new(), dealias: false, breaking_factor: 50.0, tail_threshold: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Breaking { t: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepInfo {
    pub steps: usize,
    pub dt: f64,
    /// dt·(Gershgorin bound of V)·M/L at the initial state
    pub cfl: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub history: Vec<Diagnostics>,
    pub snapshots: Vec<(f64, FieldState)>,
    pub final_state: FieldState,
    pub warnings: Vec<String>,
    pub steps: StepInfo,
    /// normalizations for relative drifts, in column order
    scales: Vec<f64>,
}

impl RunOutcome {
    /// Largest relative drift of each conserved column (U_1..U_N, momentum,
    /// H1, H2) over the run. Each is normalized by the larger of |Q(0)| and
    /// the initial integral of |density|.
    pub fn drifts(&self) -> Vec<(String, f64)> {
        let first = &self.history[0];
        let cols = |d: &Diagnostics| {
            let mut v = d.annihilators.clone();
            v.extend([d.momentum, d.h1, d.h2]);
            v
        };
        let q0 = cols(first);
        let n = first.annihilators.len();
        let mut names: Vec<String> = (1..=n).map(|i| format!("U_{i}")).collect();
        names.extend(["momentum", "H1", "H2"].map(String::from));
        let mut worst = vec![0.0f64; q0.len()];
        for d in &self.history {
            for (w, (q, (a, s))) in worst.iter_mut().zip(cols(d).iter().zip(q0.iter().zip(&self.scales))) {
                let scale = s.max(a.abs());
                let r = if scale == 0.0 { (q - a).abs() } else { (q - a).abs() / scale };
                *w = w.max(r);
            }
        }
        names.into_iter().zip(worst).collect()
    }

    pub fn max_drift(&self) -> f64 {
        self.drifts().iter().map(|d| d.1).fold(0.0, f64::max)
    }
}

/// Evolves `initial` to `t_end`, recording diagnostics after every step.
pub fn run(
    flow: &CompiledFlow,
    densities: &Densities,
    spectral: &Spectral,
    initial: &FieldState,
    cfg: &RunConfig,
) -> Result<RunOutcome> {
    if !(cfg.dt > 0.0 && cfg.t_end >= 0.0) {
        return Err(Error::Input("dt must be positive and t_end non-negative".into()));
    }
    let grid = spectral.grid();
    let steps = (cfg.t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { cfg.dt } else { cfg.t_end / steps as f64 };
    let cfl = dt * flow.speed_bound(initial) * grid.points() as f64 / grid.period();
    let mut warnings = Vec::new();
    if cfl >= 1.0 {
        warnings.push(format!("CFL number {cfl:.3} >= 1: time step too large for the grid"));
    }
    let first = diagnostics(spectral, densities, initial);
    let scales = {
        let [(_, m_abs), (_, h2_abs)] = densities.integrals(grid, initial);
        let mut s: Vec<f64> = initial.fields.iter().map(|f| f.iter().map(|v| v.abs()).sum::<f64>() / f.len() as f64).collect();
        s.extend([m_abs, m_abs, h2_abs]);
        s
    };
    let limit = cfg.breaking_factor * first.max_vx;
    let mut tail_warned = false;
    let mut check_tail = |d: &Diagnostics, warnings: &mut Vec<String>| {
        if !tail_warned && d.tail > cfg.tail_threshold {
            tail_warned = true;
            warnings.push(format!("spectral tail fraction {:.3e} exceeds {:.0e} at t = {}", d.tail, cfg.tail_threshold, d.t));
        }
    };
    check_tail(&first, &mut warnings);
    let mut snap_times: Vec<f64> = cfg.snapshots.clone();
    snap_times.sort_by(f64::total_cmp);
    let mut snapshots = Vec::new();
    let mut take_snaps = |state: &FieldState, snapshots: &mut Vec<(f64, FieldState)>| {
        while let Some(&ts) = snap_times.first() {
            if state.t + dt / 2.0 >= ts {
                snapshots.push((ts, state.clone()));
                snap_times.remove(0);
            } else {
                break;
            }
        }
    };
    take_snaps(initial, &mut snapshots);
    let mut history = vec![first];
    let mut state = initial.clone();
    let mut status = RunStatus::Completed;
    for step in 1..=steps {
        state = step_rk4(flow, spectral, &state, dt, cfg.dealias)?;
        state.t = step as f64 * dt;
        let d = diagnostics(spectral, densities, &state);
        check_tail(&d, &mut warnings);
        let broke = limit > 0.0 && d.max_vx > limit;
        history.push(d);
        take_snaps(&state, &mut snapshots);
        if broke {
            status = RunStatus::Breaking { t: state.t };
            break;
        }
    }
    Ok(RunOutcome {
        status,
        history,
        snapshots,
        final_state: state,
        warnings,
        steps: StepInfo { steps, dt, cfl },
        scales,
    })
}

/// ‖Φ^A_τΦ^B_τ(v) − Φ^B_τΦ^A_τ(v)‖∞ with one RK4 step per flow map.
pub fn commute_check_numeric(
    a: &CompiledFlow,
    b: &CompiledFlow,
    spectral: &Spectral,
    state: &FieldState,
    tau: f64,
) -> Result<f64> {
    let ab = step_rk4(a, spectral, &step_rk4(b, spectral, state, tau, false)?, tau, false)?;
    let ba = step_rk4(b, spectral, &step_rk4(a, spectral, state, tau, false)?, tau, false)?;
    Ok(ab.max_abs_diff(&ba))
}

pub fn write_diagnostics_csv(mut w: impl Write, history: &[Diagnostics]) -> std::io::Result<()> {
    let n = history.first().map_or(0, |d| d.annihilators.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("U_{i}")));
    header.extend(["momentum", "H1", "H2", "max_vx", "tail"].map(String::from));
    writeln!(w, "{}", header.join(","))?;
    for d in history {
        let mut row = d.annihilators.clone();
        row.extend([d.momentum, d.h1, d.h2, d.max_vx, d.tail]);
        writeln!(w, "{},{}", d.t, join_sci(&row))?;
    }
    Ok(())
}

pub fn write_snapshot_csv(mut w: impl Write, grid: &Grid, state: &FieldState) -> std::io::Result<()> {
    let mut header = vec!["x".to_string()];
    header.extend((1..=state.dim()).map(|i| format!("v{i}")));
    writeln!(w, "{}", header.join(","))?;
    for (m, x) in grid.nodes().into_iter().enumerate() {
        writeln!(w, "{x},{}", join_sci(&state.at(m)))?;
    }
    Ok(())
}

fn join_sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
}
