use super::*;
use crate::bracket::{CanonicalPair, ConstantBracket};
use crate::expr::{field_names, int, parse_expr, Rational};
use crate::hierarchy::{flow_t1, flow_t2, hierarchy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(eta: ConstantBracket, k: Rational, h: &[&str]) -> CanonicalPair {
    let names = field_names(eta.dim());
    let h = h.iter().map(|s| parse_expr(s, &names).unwrap()).collect();
    CanonicalPair::new(eta, k, h).unwrap()
}

fn burgers() -> CanonicalPair {
    pair(ConstantBracket::identity(1), int(0), &["u1^2/2"])
}

fn periodic(m: usize) -> (Grid, Spectral) {
    let grid = Grid::new(m, 2.0 * std::f64::consts::PI).unwrap();
    let s = Spectral::new(&grid);
    (grid, s)
}

fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.nodes().into_iter().map(f).collect()
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// v = v0(x + c·v·t) by fixed-point iteration
fn characteristics(x: f64, t: f64, c: f64, amp: f64) -> f64 {
    let mut v = amp * x.sin();
    for _ in 0..200 {
        v = amp * (x + c * v * t).sin();
    }
    v
}

#[test]
fn grid_validation() {
    assert!(Grid::new(6, 1.0).is_err());
    assert!(Grid::new(12, 1.0).is_err());
    assert!(Grid::new(16, 0.0).is_err());
    assert!(FieldState::new(vec![vec![f64::NAN; 8]], 0.0).is_err());
}

#[test]
fn spectral_derivative() {
    let (grid, s) = periodic(64);
    assert!(max_err(&s.dx(&sample(&grid, f64::sin)), &sample(&grid, f64::cos)) < 1e-12);
    assert!(max_err(&s.dx(&vec![3.0; 64]), &vec![0.0; 64]) < 1e-14);
    let (grid, s) = periodic(16);
    let d = s.dx(&sample(&grid, |x| (7.0 * x).sin()));
    assert!(max_err(&d, &sample(&grid, |x| 7.0 * (7.0 * x).cos())) < 1e-10);
}

#[test]
fn spectral_antiderivative() {
    let (grid, s) = periodic(64);
    assert!(max_err(&s.antidx(&sample(&grid, f64::cos)).unwrap(), &sample(&grid, f64::sin)) < 1e-12);
    assert_eq!(s.antidx(&vec![0.0; 64]).unwrap(), vec![0.0; 64]);
    let f = sample(&grid, |x| (x.sin() * 0.7).exp() - 1.0);
    let mean = grid.mean(&f);
    let f: Vec<f64> = f.iter().map(|v| v - mean).collect();
    assert!(max_err(&s.antidx(&s.dx(&f)).unwrap(), &f) < 1e-12);
    assert!(matches!(s.antidx(&sample(&grid, |x| 1.0 + x.sin())), Err(Error::Numerical(_))));
}

#[test]
fn compiled_flow_matches_exact_evaluation() {
    let p = pair(ConstantBracket::identity(2), int(1), &["u1^2/2 + u2^2/2", "u1"]);
    let t2 = flow_t2(&p).unwrap();
    let c = CompiledFlow::from_flow(&t2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let pt = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let a = c.matrix_at(&pt);
        for i in 0..2 {
            for k in 0..2 {
                let exact = t2.v[[i, k]].eval_f64(&pt).unwrap();
                assert!((a[i * 2 + k] - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{} vs {exact} at {pt:?}", a[i * 2 + k]);
            }
        }
    }
}

fn burgers_run(m: usize) -> (RunOutcome, Grid) {
    let p = burgers();
    let (grid, s) = periodic(m);
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let init = FieldState::from_expressions(&grid, &["0.1*sin(x)"]).unwrap();
    let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(1e-3, 0.2)).unwrap();
    (out, grid)
}

#[test]
fn burgers_against_characteristics() {
    let (out, grid) = burgers_run(256);
    assert_eq!(out.status, RunStatus::Completed);
    assert!((out.final_state.t - 0.2).abs() < 1e-12);
    let exact = sample(&grid, |x| characteristics(x, 0.2, 3.0, 0.1));
    assert!(max_err(&out.final_state.fields[0], &exact) < 1e-6);
    assert!(out.max_drift() < 1e-8, "{:?}", out.drifts());
    assert!(out.warnings.is_empty(), "{:?}", out.warnings);
}

#[test]
fn refinement_reduces_error() {
    let p = burgers();
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let err = |m: usize| {
        let (grid, s) = periodic(m);
        let init = FieldState::from_expressions(&grid, &["0.5*sin(x)"]).unwrap();
        let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(1e-4, 0.3)).unwrap();
        max_err(&out.final_state.fields[0], &sample(&grid, |x| characteristics(x, 0.3, 3.0, 0.5)))
    };
    let (coarse, fine) = (err(16), err(32));
    assert!(coarse >= 10.0 * fine, "{coarse:e} vs {fine:e}");
}

#[test]
fn linear_system_plane_waves() {
    let (grid, s) = periodic(64);
    let mut a = crate::tensor::Matrix::zeros(2);
    a[[0, 1]] = crate::expr::Expr::one();
    a[[1, 0]] = crate::expr::Expr::one();
    let flow = CompiledFlow::new(&a);
    let init = FieldState::from_expressions(&grid, &["sin(x)", "0"]).unwrap();
    let dens = Densities::new(&ConstantBracket::identity(2).momentum_density(), &crate::expr::Expr::zero());
    let out = run(&flow, &dens, &s, &init, &RunConfig::new(1e-3, 0.5)).unwrap();
    let t = 0.5;
    let v1 = sample(&grid, |x| ((x + t).sin() + (x - t).sin()) / 2.0);
    let v2 = sample(&grid, |x| ((x + t).sin() - (x - t).sin()) / 2.0);
    assert!(max_err(&out.final_state.fields[0], &v1) < 1e-8);
    assert!(max_err(&out.final_state.fields[1], &v2) < 1e-8);
}

#[test]
fn linear_pair_conserves() {
    let p = pair(ConstantBracket::identity(2), int(0), &["u1 + 2*u2", "u1 - u2"]);
    let (grid, s) = periodic(256);
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let init = FieldState::from_expressions(&grid, &["0.1*sin(x)", "0.2*cos(2*x) + 0.05"]).unwrap();
    let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(1e-3, 0.2)).unwrap();
    assert!(out.max_drift() < 1e-8, "{:?}", out.drifts());
}

#[test]
fn constant_state_is_stationary() {
    let p = burgers();
    let (grid, s) = periodic(32);
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let init = FieldState::from_expressions(&grid, &["0.7"]).unwrap();
    let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(1e-2, 1.0)).unwrap();
    assert_eq!(out.final_state.fields, init.fields);
    let zero = FieldState::new(vec![vec![0.0; 32]], 0.0).unwrap();
    assert_eq!(step_rk4(&flow, &s, &zero, 0.1, false).unwrap().fields, zero.fields);
}

#[test]
fn breaking_is_detected() {
    let p = burgers();
    let (grid, s) = periodic(256);
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let init = FieldState::from_expressions(&grid, &["0.1*sin(x)"]).unwrap();
    let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(1e-3, 10.0));
    match out {
        Ok(o) => assert!(matches!(o.status, RunStatus::Breaking { t } if t > 1.0 && t < 10.0)),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn cfl_warning() {
    let p = burgers();
    let (grid, s) = periodic(64);
    let flow = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let init = FieldState::from_expressions(&grid, &["sin(x)"]).unwrap();
    let out = run(&flow, &Densities::from_pair(&p).unwrap(), &s, &init, &RunConfig::new(0.1, 0.1)).unwrap();
    assert!(out.warnings.iter().any(|w| w.contains("CFL")));
}

#[test]
fn operator_matches_first_flow() {
    let p = pair(ConstantBracket::identity(2), int(1), &["u1^2/2 + u2^2/2", "u1"]);
    let (grid, s) = periodic(256);
    let br = CompiledBracket::from_pair(&p);
    let t1 = CompiledFlow::from_flow(&flow_t1(&p).unwrap());
    let momentum = crate::expr::CompiledExpr::new(&p.eta.momentum_density());
    let k = num_traits::ToPrimitive::to_f64(&p.k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let c: Vec<f64> = (0..6).map(|_| rng.random_range(-0.2..0.2)).collect();
        let state = FieldState::new(
            vec![
                sample(&grid, |x| c[0] * x.sin() + c[1] * (2.0 * x).cos() + c[2]),
                sample(&grid, |x| c[3] * x.cos() + c[4] * (3.0 * x).sin() + c[5]),
            ],
            0.0,
        )
        .unwrap();
        let xi = state.fields.clone();
        let got = apply_p1_numeric(&br, &s, &state, &xi).unwrap();
        let target = t1.rhs(&s, &state);
        let mean_s0 = grid.mean(&(0..256).map(|m| momentum.eval(&state.at(m))).collect::<Vec<_>>());
        for i in 0..2 {
            let vx = s.dx(&state.fields[i]);
            let corrected: Vec<f64> = target[i].iter().zip(&vx).map(|(t, d)| t - k * mean_s0 * d).collect();
            assert!(max_err(&got[i], &corrected) < 1e-8);
        }
    }
    let zero = vec![vec![0.0; 256]; 2];
    let state = FieldState::new(vec![sample(&grid, f64::sin), sample(&grid, f64::cos)], 0.0).unwrap();
    assert_eq!(apply_p1_numeric(&br, &s, &state, &zero).unwrap(), zero);
}

#[test]
fn numeric_commutation_orders() {
    let p = burgers();
    let flows = hierarchy(&p, 2, &[]).unwrap();
    let (grid, s) = periodic(64);
    let a = CompiledFlow::from_flow(&flows[1]);
    let b = CompiledFlow::from_flow(&flows[2]);
    let state = FieldState::from_expressions(&grid, &["0.3*sin(x) + 0.1*cos(2*x)"]).unwrap();
    assert!(commute_check_numeric(&a, &a, &s, &state, 1e-2).unwrap() < 1e-13);
    let d1 = commute_check_numeric(&a, &b, &s, &state, 2e-2).unwrap();
    let d2 = commute_check_numeric(&a, &b, &s, &state, 1e-2).unwrap();
    assert!(d1 / d2 >= 7.0);
}

#[test]
fn numeric_commutation_detects_perturbation() {
    let p = pair(ConstantBracket::identity(2), int(1), &["u1^2/2 + u2^2/2", "u1"]);
    let flows = hierarchy(&p, 2, &[p.eta.lower_index(&p.h_at_origin().unwrap())]).unwrap();
    let (grid, s) = periodic(64);
    let state = FieldState::from_expressions(&grid, &["0.3*sin(x)", "0.2*cos(x) + 0.1"]).unwrap();
    let a = CompiledFlow::from_flow(&flows[1]);
    let b = CompiledFlow::from_flow(&flows[2]);
    let ratio = |b: &CompiledFlow| {
        commute_check_numeric(&a, b, &s, &state, 2e-2).unwrap() / commute_check_numeric(&a, b, &s, &state, 1e-2).unwrap()
    };
    assert!(ratio(&b) >= 7.0);
    let mut perturbed = flows[2].v.clone();
    perturbed[[0, 1]] = &perturbed[[0, 1]] + &crate::expr::Expr::constant(crate::expr::rat(1, 10));
    let r = ratio(&CompiledFlow::new(&perturbed));
    assert!(r > 3.0 && r < 5.0, "{r}");
}
