use num_traits::Zero;
use serde::Serialize;

use super::report::{condition, PoissonReport};
use super::{ConstantBracket, HydroBracket};
use crate::expr::{guarded, Expr, Rational, DEFAULT_SEED};
use crate::tensor::{Matrix, Tensor3, Tensor4};
use crate::Result;

/// Bracket coefficients with a possibly non-constant K (a pencil parameter
/// counts as an extra variable).
pub(crate) struct Coeffs<'a> {
    pub g: &'a Matrix,
    pub b: &'a Tensor3,
    pub k: Expr,
    pub n_vars: usize,
}

fn delta(i: usize, j: usize) -> bool {
    i == j
}

/// `db[[j, r, s, k]]` = ∂b^{jr}_s/∂u^k
fn connection_derivatives(b: &Tensor3) -> Tensor4 {
    Tensor4::par_from_fn(b.dim(), |j, r, s, k| b[[j, r, s]].derivative(k))
}

pub(crate) fn poisson_conditions(c: &Coeffs, seed: u64) -> Result<PoissonReport> {
    guarded(|| {
        let n = c.g.dim();
        let (g, b, k) = (c.g, c.b, &c.k);
        let db = connection_derivatives(b);

        let s1 = Matrix::from_fn(n, |i, j| &g[[i, j]] - &g[[j, i]]);
        let s2 = Tensor3::par_from_fn(n, |i, j, kk| {
            &(&g[[i, j]].derivative(kk) - &b[[i, j, kk]]) - &b[[j, i, kk]]
        });
        let s3 = Tensor3::par_from_fn(n, |i, j, r| {
            (0..n)
                .map(|s| &g[[i, s]] * &b[[j, r, s]] - &g[[j, s]] * &b[[i, r, s]])
                .sum()
        });
        let s4 = Tensor4::par_from_fn(n, |i, j, r, kk| {
            let mut lhs = Expr::zero();
            for s in 0..n {
                let curl = &db[[j, r, s, kk]] - &db[[j, r, kk, s]];
                lhs = lhs + &g[[i, s]] * &curl + &b[[i, j, s]] * &b[[s, r, kk]]
                    - &b[[i, r, s]] * &b[[s, j, kk]];
            }
            let mut rhs = Expr::zero();
            if delta(j, kk) {
                rhs = rhs + &g[[i, r]];
            }
            if delta(r, kk) {
                rhs = rhs - &g[[i, j]];
            }
            lhs - k * &rhs
        });
        let mut report = PoissonReport::default();
        report.conditions.push(condition("s1", s1.entries(), c.n_vars, seed));
        report.conditions.push(condition("s2", s2.entries(), c.n_vars, seed));
        report.conditions.push(condition("s3", s3.entries(), c.n_vars, seed));
        report.conditions.push(condition("s4", s4.entries(), c.n_vars, seed));
        let s5 = cyclic_condition(c, &db);
        report.conditions.push(condition("s5", s5.iter().map(|(i, e)| (*i, e)), c.n_vars, seed));
        Ok(report)
    })
}

/// Residuals of the cyclic relation, indexed `[i, j, r, k, p]`.
fn cyclic_condition(c: &Coeffs, db: &Tensor4) -> Vec<([usize; 5], Expr)> {
    use rayon::prelude::*;
    let n = c.g.dim();
    let (b, k) = (c.b, &c.k);
    let term = |i: usize, j: usize, r: usize, kk: usize, p: usize| -> Expr {
        let mut t = Expr::zero();
        for s in 0..n {
            t = t + &b[[s, i, p]] * &(&db[[j, r, kk, s]] - &db[[j, r, s, kk]])
                + &b[[s, i, kk]] * &(&db[[j, r, p, s]] - &db[[j, r, s, p]]);
        }
        if delta(r, p) {
            t = t + k * &(&b[[i, j, kk]] - &b[[j, i, kk]]);
        }
        if delta(r, kk) {
            t = t + k * &(&b[[i, j, p]] - &b[[j, i, p]]);
        }
        t
    };
    let total = n.pow(5);
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = [0usize; 5];
            let mut f = flat;
            for slot in idx.iter_mut().rev() {
                *slot = f % n;
                f /= n;
            }
            let [i, j, r, kk, p] = idx;
            let e = term(i, j, r, kk, p) + term(j, r, i, kk, p) + term(r, i, j, kk, p);
            (idx, e)
        })
        .collect()
}

pub fn check_poisson(b: &HydroBracket) -> Result<PoissonReport> {
    check_poisson_seeded(b, DEFAULT_SEED)
}

pub fn check_poisson_seeded(b: &HydroBracket, seed: u64) -> Result<PoissonReport> {
    let c = Coeffs { g: &b.g, b: &b.b, k: Expr::constant(b.k.clone()), n_vars: b.dim() };
    poisson_conditions(&c, seed)
}

pub(crate) fn compat_conditions(b: &HydroBracket, eta: &ConstantBracket, seed: u64) -> Result<PoissonReport> {
    guarded(|| {
        let n = b.dim();
        let db = connection_derivatives(&b.b);
        let k = Expr::constant(b.k.clone());
        let c1 = Tensor3::par_from_fn(n, |i, j, r| {
            (0..n)
                .map(|s| b.b[[j, r, s]].scale(eta.upper(i, s)) - b.b[[i, r, s]].scale(eta.upper(j, s)))
                .sum()
        });
        let c2 = Tensor4::par_from_fn(n, |j, r, s, kk| {
            let mut model = 0i64;
            if r == s && j == kk {
                model += 1;
            }
            if j == s && r == kk {
                model -= 1;
            }
            &(&db[[j, r, s, kk]] - &db[[j, r, kk, s]]) - &k.scale(&Rational::from_integer(model.into()))
        });
        let mut report = PoissonReport::default();
        report.conditions.push(condition("c1", c1.entries(), n, seed));
        report.conditions.push(condition("c2", c2.entries(), n, seed));
        Ok(report)
    })
}

/// Compatibility with the constant bracket η: the two linear conditions plus
/// the Poisson property of `b` itself.
pub fn check_compat_constant(b: &HydroBracket, eta: &ConstantBracket) -> Result<PoissonReport> {
    check_compat_constant_seeded(b, eta, DEFAULT_SEED)
}

pub fn check_compat_constant_seeded(b: &HydroBracket, eta: &ConstantBracket, seed: u64) -> Result<PoissonReport> {
    if b.dim() != eta.dim() {
        return Err(crate::Error::Dimension("bracket and eta differ in dimension".into()));
    }
    let mut report = compat_conditions(b, eta, seed)?;
    report.extend(check_poisson_seeded(b, seed)?);
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PencilReport {
    /// Conditions for B1 + λB2 with λ an extra variable (index N).
    pub pencil: PoissonReport,
    /// (λ0, λ1) with λ0·K1 + λ1·K2 = 0, not both zero.
    #[serde(serialize_with = "ser_pair")]
    pub local_member: (Rational, Rational),
}

fn ser_pair<S: serde::Serializer>(v: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([v.0.to_string(), v.1.to_string()])
}

impl PencilReport {
    pub fn passed(&self) -> bool {
        self.pencil.passed()
    }
}

/// The member λ0·B1 + λ1·B2 of the pencil whose nonlocal constant vanishes.
pub fn local_member(b1: &HydroBracket, b2: &HydroBracket) -> ((Rational, Rational), HydroBracket) {
    let coeffs = if b1.k.is_zero() && b2.k.is_zero() {
        (Rational::from_integer(1.into()), Rational::zero())
    } else {
        (b2.k.clone(), -b1.k.clone())
    };
    let local = b1.combine(&coeffs.0, b2, &coeffs.1);
    (coeffs, local)
}

pub fn check_pencil(b1: &HydroBracket, b2: &HydroBracket) -> Result<PencilReport> {
    check_pencil_seeded(b1, b2, DEFAULT_SEED)
}

pub fn check_pencil_seeded(b1: &HydroBracket, b2: &HydroBracket, seed: u64) -> Result<PencilReport> {
    let n = b1.dim();
    if b2.dim() != n {
        return Err(crate::Error::Dimension("pencil members differ in dimension".into()));
    }
    let lambda = Expr::var(n);
    let g = b1.g.zip_with(&b2.g, |x, y| x + &(&lambda * y));
    let b = b1.b.zip_with(&b2.b, |x, y| x + &(&lambda * y));
    let k = Expr::constant(b1.k.clone()) + lambda.scale(&b2.k);
    let pencil = poisson_conditions(&Coeffs { g: &g, b: &b, k, n_vars: n + 1 }, seed)?;
    let (local, _) = local_member(b1, b2);
    Ok(PencilReport { pencil, local_member: local })
}
