use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::{Cli, Command, ProblemFile};
use crate::bracket::{
    check_canonical_equations_seeded, check_compat_constant_seeded, check_pencil_seeded, check_poisson_seeded,
    equivalence_audit, liouville_function, special_liouville, CanonicalPair, HydroBracket, PoissonReport,
};
use crate::expr::{field_names, flow_names, parse_rational, Expr, Rational, DEFAULT_SEED};
use crate::hierarchy::{commute_check_seeded, hierarchy, involution_check, ConservativeFlow, Operator};
use crate::numsim::{
    commute_check_numeric, run, write_diagnostics_csv, write_snapshot_csv, CompiledFlow, Densities, FieldState,
    RunConfig, RunStatus, Spectral,
};
use crate::{Error, Result};

fn io_err(e: std::io::Error) -> Error {
    Error::Input(format!("i/o: {e}"))
}

macro_rules! out {
    ($w:expr, $($arg:tt)*) => { writeln!($w, $($arg)*).map_err(io_err)? };
}

pub(super) fn execute(cli: &Cli, w: &mut dyn Write) -> Result<i32> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::CheckPoisson { file } => {
            let b = ProblemFile::load(file)?.bracket()?;
            report(cli, w, &check_poisson_seeded(&b, seed)?)
        }
        Command::CheckCompat { file } => {
            let p = ProblemFile::load(file)?;
            let eta = p.eta()?.ok_or_else(|| Error::Input("eta: required for check-compat".into()))?;
            report(cli, w, &check_compat_constant_seeded(&p.bracket()?, &eta, seed)?)
        }
        Command::CheckPencil { first, second } => {
            let (b1, b2) = (ProblemFile::load(first)?.bracket()?, ProblemFile::load(second)?.bracket()?);
            let r = check_pencil_seeded(&b1, &b2, seed)?;
            let (c1, c2) = &r.local_member;
            if cli.json {
                let v = json!({"pencil": r.pencil, "local_member": [c1.to_string(), c2.to_string()]});
                out!(w, "{}", pretty(&v));
            } else {
                out!(w, "local member: {c1}·first + {c2}·second");
                out!(w, "{}", r.pencil);
            }
            Ok(i32::from(!r.pencil.passed()))
        }
        Command::CheckCanonical { file } => {
            let p = ProblemFile::load(file)?.pair()?;
            let eq = check_canonical_equations_seeded(&p, seed)?;
            let audit = equivalence_audit(&p)?;
            if cli.json {
                let v = json!({"equations": eq, "poisson": audit.poisson, "assoc_reduction": audit.assoc_reduction});
                out!(w, "{}", pretty(&v));
            } else {
                out!(w, "{eq}");
                out!(w, "bracket Poisson: {}", if audit.is_poisson() { "yes" } else { "no" });
            }
            Ok(i32::from(!eq.passed()))
        }
        Command::BuildCanonical { file } => {
            let p = ProblemFile::load(file)?.pair()?;
            let b = crate::bracket::build_canonical(&p);
            if cli.json {
                out!(w, "{}", pretty(&bracket_json(&b)));
            } else {
                write_bracket(w, &b)?;
            }
            Ok(0)
        }
        Command::Liouville { file } => {
            let p = ProblemFile::load(file)?;
            let b = p.bracket()?;
            let data = match p.eta()? {
                Some(eta) => special_liouville(&b, &eta),
                None => liouville_function(&b),
            };
            let data = match data {
                Ok(d) => d,
                Err(Error::NotClosed(m)) => {
                    out!(w, "{m}");
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            let names = field_names(b.dim());
            let n = b.dim();
            let phi: Vec<Vec<String>> =
                (0..n).map(|i| (0..n).map(|j| data.phi[[i, j]].display(&names).to_string()).collect()).collect();
            let h: Option<Vec<String>> =
                data.h.as_ref().map(|h| h.iter().map(|e| e.display(&names).to_string()).collect());
            if cli.json {
                out!(w, "{}", pretty(&json!({"phi": phi, "H": h})));
            } else {
                for (i, row) in phi.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        out!(w, "Phi^{}{} = {e}", i + 1, j + 1);
                    }
                }
                if let Some(h) = h {
                    for (j, e) in h.iter().enumerate() {
                        out!(w, "H^{} = {e}", j + 1);
                    }
                }
            }
            Ok(0)
        }
        Command::Hierarchy { file, levels, gauge } => {
            let p = ProblemFile::load(file)?.pair()?;
            let gauges = parse_gauge(gauge, &p, *levels)?;
            let flows = hierarchy(&p, *levels, &gauges)?;
            hierarchy_report(cli, w, &p, &flows, seed)
        }
        Command::Simulate { file, level, out, gauge, dealias } => {
            simulate(cli, w, &ProblemFile::load(file)?, *level, out, gauge, *dealias)
        }
        Command::Commute { file, flows, gauge, tau } => {
            let problem = ProblemFile::load(file)?;
            let p = problem.pair()?;
            let levels: Vec<usize> = flows
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Input(format!("--flows: bad level `{s}`"))))
                .collect::<Result<_>>()?;
            let [a, b] = levels[..] else {
                return Err(Error::Input("--flows: expected two levels `a,b`".into()));
            };
            let top = a.max(b);
            let all = hierarchy(&p, top, &parse_gauge(gauge, &p, top)?)?;
            let sym = commute_check_seeded(&all[a].v, &all[b].v, seed)?;
            let numeric = match &problem.simulation {
                Some(_) => {
                    let sim = problem.simulation()?;
                    let grid = sim.grid()?;
                    let spectral = Spectral::new(&grid);
                    let state = FieldState::from_expressions(&grid, &sim.init)?;
                    let (fa, fb) = (CompiledFlow::from_flow(&all[a]), CompiledFlow::from_flow(&all[b]));
                    let d1 = commute_check_numeric(&fa, &fb, &spectral, &state, *tau)?;
                    let d2 = commute_check_numeric(&fa, &fb, &spectral, &state, tau / 2.0)?;
                    Some((d1, d2))
                }
                None => None,
            };
            if cli.json {
                let num = numeric.map(|(d1, d2)| json!({"tau": tau, "defect": d1, "defect_half": d2, "ratio": d1 / d2}));
                out!(w, "{}", pretty(&json!({"flows": [a, b], "symbolic": sym, "numeric": num})));
            } else {
                out!(w, "flows t{a} and t{b}");
                out!(w, "{sym}");
                if let Some((d1, d2)) = numeric {
                    out!(w, "numeric defect: {d1:.3e} (tau = {tau}), {d2:.3e} (tau/2), ratio {:.2}", d1 / d2);
                }
            }
            Ok(i32::from(!sym.passed()))
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn report(cli: &Cli, w: &mut dyn Write, r: &PoissonReport) -> Result<i32> {
    if cli.json {
        out!(w, "{}", pretty(&serde_json::to_value(r).expect("report serializes")));
    } else {
        out!(w, "{r}");
    }
    Ok(i32::from(!r.passed()))
}

fn bracket_json(b: &HydroBracket) -> Value {
    let n = b.dim();
    let names = field_names(n);
    let s = |e: &Expr| e.display(&names).to_string();
    json!({
        "N": n,
        "K": b.k.to_string(),
        "g": (0..n).map(|i| (0..n).map(|j| s(&b.g[[i, j]])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "b": (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| s(&b.b[[i, j, k]])).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn write_bracket(w: &mut dyn Write, b: &HydroBracket) -> Result<()> {
    let n = b.dim();
    let names = field_names(n);
    out!(w, "K = {}", b.k);
    for i in 0..n {
        for j in 0..n {
            out!(w, "g^{}{} = {}", i + 1, j + 1, b.g[[i, j]].display(&names));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !b.b[[i, j, k]].is_zero() {
                    out!(w, "b^{}{}_{} = {}", i + 1, j + 1, k + 1, b.b[[i, j, k]].display(&names));
                }
            }
        }
    }
    Ok(())
}

/// `h0`, `zero`, or `a,b;c,d` (one covector per level).
pub(super) fn parse_gauge(text: &str, p: &CanonicalPair, levels: usize) -> Result<Vec<Vec<Rational>>> {
    match text.trim() {
        "zero" => Ok(Vec::new()),
        "h0" if levels == 0 => Ok(Vec::new()),
        "h0" => Ok(vec![p.eta.lower_index(&p.h_at_origin()?)]),
        text => text
            .split(';')
            .map(|level| {
                let v = level
                    .split(',')
                    .map(|c| parse_rational(c.trim()).map_err(|e| Error::Input(format!("--gauge: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if v.len() != p.dim() {
                    return Err(Error::Input(format!("--gauge: expected {} components per level", p.dim())));
                }
                Ok(v)
            })
            .collect(),
    }
}

fn hierarchy_report(
    cli: &Cli,
    w: &mut dyn Write,
    p: &CanonicalPair,
    flows: &[ConservativeFlow],
    seed: u64,
) -> Result<i32> {
    let n = p.dim();
    let names = flow_names(n);
    let s = |e: &Expr| e.display(&names).to_string();
    let mut commuting = Vec::new();
    let mut involution = Vec::new();
    for a in 0..flows.len() {
        for b in a + 1..flows.len() {
            commuting.push((a, b, commute_check_seeded(&flows[a].v, &flows[b].v, seed)?.passed()));
            let p1 = involution_check(p, &flows[a].s, &flows[b].s, Operator::P1)?;
            let p2 = involution_check(p, &flows[a].s, &flows[b].s, Operator::P2)?;
            involution.push((a, b, p1, p2));
        }
    }
    let all_ok = commuting.iter().all(|c| c.2) && involution.iter().all(|c| c.2 && c.3);
    if cli.json {
        let fl: Vec<Value> = flows
            .iter()
            .enumerate()
            .map(|(lvl, f)| {
                json!({
                    "level": lvl,
                    "F": f.f.iter().map(s).collect::<Vec<_>>(),
                    "S": s(&f.s),
                    "V": (0..n).map(|i| (0..n).map(|k| s(&f.v[[i, k]])).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let cm: Vec<Value> = commuting.iter().map(|(a, b, ok)| json!({"flows": [a, b], "commute": ok})).collect();
        let inv: Vec<Value> =
            involution.iter().map(|(a, b, p1, p2)| json!({"densities": [a, b], "P1": p1, "P2": p2})).collect();
        out!(w, "{}", pretty(&json!({"variables": names, "flows": fl, "commutation": cm, "involution": inv})));
    } else {
        for (lvl, f) in flows.iter().enumerate() {
            out!(w, "level {lvl}");
            for (i, e) in f.f.iter().enumerate() {
                out!(w, "  F{} = {}", i + 1, s(e));
            }
            out!(w, "  S = {}", s(&f.s));
            for i in 0..n {
                for k in 0..n {
                    out!(w, "  V{}{} = {}", i + 1, k + 1, s(&f.v[[i, k]]));
                }
            }
        }
        for (a, b, ok) in &commuting {
            out!(w, "t{a}, t{b}: {}", if *ok { "commute" } else { "DO NOT COMMUTE" });
        }
        for (a, b, p1, p2) in &involution {
            let v = |x: bool| if x { "ok" } else { "FAIL" };
            out!(w, "{{S{a}, S{b}}}: P1 {}, P2 {}", v(*p1), v(*p2));
        }
    }
    Ok(i32::from(!all_ok))
}

fn simulate(
    cli: &Cli,
    w: &mut dyn Write,
    problem: &ProblemFile,
    level: usize,
    out_dir: &Path,
    gauge: &str,
    dealias: bool,
) -> Result<i32> {
    let p = problem.pair()?;
    let sim = problem.simulation()?;
    let grid = sim.grid()?;
    let spectral = Spectral::new(&grid);
    let flows = hierarchy(&p, level, &parse_gauge(gauge, &p, level)?)?;
    let flow = CompiledFlow::from_flow(&flows[level]);
    let initial = FieldState::from_expressions(&grid, &sim.init)?;
    let mut cfg = RunConfig::new(sim.dt, sim.t_end);
    cfg.snapshots = sim.snapshots.clone();
    cfg.dealias = dealias;
    let outcome = run(&flow, &Densities::from_pair(&p)?, &spectral, &initial, &cfg)?;
    std::fs::create_dir_all(out_dir).map_err(io_err)?;
    let diag = File::create(out_dir.join("diag.csv")).map_err(io_err)?;
    write_diagnostics_csv(BufWriter::new(diag), &outcome.history).map_err(io_err)?;
    let mut snap_files = Vec::new();
    for (t, state) in &outcome.snapshots {
        let name = format!("snap_{t}.csv");
        let f = File::create(out_dir.join(&name)).map_err(io_err)?;
        write_snapshot_csv(BufWriter::new(f), &grid, state).map_err(io_err)?;
        snap_files.push(name);
    }
    let drifts = outcome.drifts();
    let within = drifts.iter().all(|d| d.1 < cli.tol);
    let code = match outcome.status {
        RunStatus::Breaking { .. } => 3,
        RunStatus::Completed if within => 0,
        RunStatus::Completed => 1,
    };
    if cli.json {
        let dr: serde_json::Map<String, Value> = drifts.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let v = json!({
            "level": level,
            "status": outcome.status,
            "steps": outcome.steps,
            "t_final": outcome.final_state.t,
            "drifts": dr,
            "tolerance": cli.tol,
            "warnings": outcome.warnings,
            "files": std::iter::once("diag.csv".to_string()).chain(snap_files).collect::<Vec<_>>(),
        });
        out!(w, "{}", pretty(&v));
    } else {
        out!(w, "flow t{level}, M = {}, dt = {}, steps = {}, CFL = {:.3}", grid.points(), outcome.steps.dt, outcome.steps.steps, outcome.steps.cfl);
        match outcome.status {
            RunStatus::Completed => out!(w, "completed at t = {}", outcome.final_state.t),
            RunStatus::Breaking { t } => out!(w, "breaking detected at t = {t}"),
        }
        for (name, d) in &drifts {
            out!(w, "drift {name}: {d:.3e}");
        }
        for warning in &outcome.warnings {
            out!(w, "warning: {warning}");
        }
        out!(w, "drifts {} tolerance {:e}", if within { "within" } else { "EXCEED" }, cli.tol);
    }
    Ok(code)
}
