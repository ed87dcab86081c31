use serde::Serialize;

use super::poisson::check_poisson_seeded;
use super::report::{condition, PoissonReport};
use super::{CanonicalPair, HydroBracket};
use crate::expr::{guarded, Expr, DEFAULT_SEED};
use crate::tensor::{Matrix, Tensor3, Tensor4};
use crate::{Error, Result};

/// The bracket generated by a canonical pair:
/// g^{ij} = η^{is}∂_sH^j + η^{js}∂_sH^i − K u^i u^j,
/// b^{ij}_k = η^{is}∂_s∂_kH^j − K δ^i_k u^j.
pub fn build_canonical(p: &CanonicalPair) -> HydroBracket {
    let n = p.dim();
    let grad = p.gradient();
    let hess = p.hessian();
    let kk = Expr::constant(p.k.clone());
    // phi[[i, j]] = η^{is}∂_sH^j
    let phi = Matrix::from_fn(n, |i, j| (0..n).map(|s| grad[[j, s]].scale(p.eta.upper(i, s))).sum());
    let g = Matrix::from_fn(n, |i, j| &(&phi[[i, j]] + &phi[[j, i]]) - &(&kk * &(Expr::var(i) * Expr::var(j))));
    let b = Tensor3::from_fn(n, |i, j, k| {
        let mut e: Expr = (0..n).map(|s| hess[[j, s, k]].scale(p.eta.upper(i, s))).sum();
        if i == k {
            e = e - &kk * &Expr::var(j);
        }
        e
    });
    HydroBracket { g, b, k: p.k.clone() }
}

pub fn check_canonical_equations(p: &CanonicalPair) -> Result<PoissonReport> {
    check_canonical_equations_seeded(p, DEFAULT_SEED)
}

/// Residuals of the Hessian-commutation equations (ass1, indexed
/// `[i, j, k, l]`) and the metric-weighted equations (ass2, indexed
/// `[i, j, k]`).
pub fn check_canonical_equations_seeded(p: &CanonicalPair, seed: u64) -> Result<PoissonReport> {
    guarded(|| {
        let n = p.dim();
        let hess = p.hessian();
        let g = build_canonical(p).g;
        // w[[i, k, p]] = Σ_s ∂_k∂_sH^i η^{sp}
        let w = Tensor3::from_fn(n, |i, k, q| (0..n).map(|s| hess[[i, k, s]].scale(p.eta.upper(s, q))).sum());
        let ass1 = Tensor4::par_from_fn(n, |i, j, k, l| {
            (0..n)
                .map(|q| &w[[i, k, q]] * &hess[[j, q, l]] - &w[[j, k, q]] * &hess[[i, q, l]])
                .sum()
        });
        // v[[j, k, s]] = η^{jp}∂_p∂_sH^k
        let v = Tensor3::from_fn(n, |j, k, s| (0..n).map(|q| hess[[k, q, s]].scale(p.eta.upper(j, q))).sum());
        let ass2 = Tensor3::par_from_fn(n, |i, j, k| {
            (0..n)
                .map(|s| &g[[i, s]] * &v[[j, k, s]] - &g[[j, s]] * &v[[i, k, s]])
                .sum()
        });
        let mut report = PoissonReport::default();
        report.conditions.push(condition("ass1", ass1.entries(), n, seed));
        report.conditions.push(condition("ass2", ass2.entries(), n, seed));
        Ok(report)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub poisson: PoissonReport,
    pub equations: PoissonReport,
    /// The curvature-type relation coincides entrywise with the
    /// associativity relation b^{ij}_s b^{sr}_k = b^{ir}_s b^{sj}_k.
    pub assoc_reduction: bool,
}

impl AuditReport {
    pub fn is_poisson(&self) -> bool {
        self.poisson.passed()
    }
}

/// Runs the Poisson check on the generated bracket and the potential
/// equations side by side; disagreement is reported as an inconsistency.
pub fn equivalence_audit(p: &CanonicalPair) -> Result<AuditReport> {
    let bracket = build_canonical(p);
    let poisson = check_poisson_seeded(&bracket, DEFAULT_SEED)?;
    let equations = check_canonical_equations_seeded(p, DEFAULT_SEED)?;
    if poisson.passed() != equations.passed() {
        return Err(Error::Inconsistency(format!(
            "Poisson check says {} but potential equations say {}",
            poisson.passed(),
            equations.passed()
        )));
    }
    let assoc_reduction = guarded(|| Ok(s4_equals_assoc(&bracket)))?;
    if !assoc_reduction {
        return Err(Error::Inconsistency("curvature relation does not reduce to associativity".into()));
    }
    Ok(AuditReport { poisson, equations, assoc_reduction })
}

fn s4_equals_assoc(br: &HydroBracket) -> bool {
    let n = br.dim();
    let (g, b) = (&br.g, &br.b);
    let k = Expr::constant(br.k.clone());
    let diff = Tensor4::par_from_fn(n, |i, j, r, kk| {
        // curvature-type residual minus the associativity residual
        let mut e = Expr::zero();
        for s in 0..n {
            let curl = &b[[j, r, s]].derivative(kk) - &b[[j, r, kk]].derivative(s);
            e = e + &g[[i, s]] * &curl;
        }
        if j == kk {
            e = e - &k * &g[[i, r]];
        }
        if r == kk {
            e = e + &k * &g[[i, j]];
        }
        e
    });
    diff.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{check_compat_constant, check_poisson, ConstantBracket};
    use crate::expr::{int, parse_expr, rat, Rational};

    fn pair(eta: ConstantBracket, k: Rational, h: &[&str]) -> CanonicalPair {
        let n = eta.dim();
        let names = crate::expr::field_names(n);
        let h = h.iter().map(|s| parse_expr(s, &names).unwrap()).collect();
        CanonicalPair::new(eta, k, h).unwrap()
    }

    #[test]
    fn scalar_quadratic_potential() {
        let p = pair(ConstantBracket::identity(1), int(0), &["u1^2/2"]);
        let b = build_canonical(&p);
        assert_eq!(b.g[[0, 0]], Expr::var(0).scale(&int(2)));
        assert_eq!(b.b[[0, 0, 0]], Expr::one());
    }

    #[test]
    fn zero_potential() {
        let k = rat(-3, 2);
        let p = pair(ConstantBracket::identity(2), k.clone(), &["0", "0"]);
        let b = build_canonical(&p);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b.g[[i, j]], -(Expr::var(i) * Expr::var(j)).scale(&k));
                for kk in 0..2 {
                    let e = if i == kk { -Expr::var(j).scale(&k) } else { Expr::zero() };
                    assert_eq!(b.b[[i, j, kk]], e);
                }
            }
        }
        assert!(equivalence_audit(&p).unwrap().is_poisson());
    }

    #[test]
    fn linear_potentials_are_trivial_solutions() {
        let eta = ConstantBracket::new(vec![vec![int(1), int(2)], vec![int(2), int(-1)]]).unwrap();
        let p = pair(eta.clone(), int(5), &["2*u1 - u2 + 3", "u1/3 + 7*u2"]);
        assert!(check_canonical_equations(&p).unwrap().passed());
        let b = build_canonical(&p);
        assert!(check_compat_constant(&b, &eta).unwrap().passed());
        let audit = equivalence_audit(&p).unwrap();
        assert!(audit.is_poisson() && audit.assoc_reduction);
    }

    #[test]
    fn scalar_potential_always_solves() {
        let p = pair(ConstantBracket::identity(1), int(4), &["u1^3"]);
        assert!(check_canonical_equations(&p).unwrap().passed());
        assert!(check_poisson(&build_canonical(&p)).unwrap().passed());
    }

    #[test]
    fn separable_potentials_fail_when_curved() {
        let p = pair(ConstantBracket::identity(2), int(1), &["u1^2/2", "u2^2/2"]);
        let eq = check_canonical_equations(&p).unwrap();
        assert!(eq.condition("ass1").unwrap().passed());
        let ass2 = eq.condition("ass2").unwrap();
        assert!(!ass2.passed());
        assert!(ass2.witness.is_some());
        let audit = equivalence_audit(&p).unwrap();
        assert!(!audit.is_poisson());
        assert!(audit.assoc_reduction);
        // flat version of the same potentials is fine
        let flat = pair(ConstantBracket::identity(2), int(0), &["u1^2/2", "u2^2/2"]);
        assert!(equivalence_audit(&flat).unwrap().is_poisson());
    }

    #[test]
    fn potential_with_single_nonlinear_component_solves() {
        let p = pair(ConstantBracket::identity(2), int(1), &["u1^2/2 + u2^2/2", "0"]);
        assert!(check_canonical_equations(&p).unwrap().passed());
        assert!(equivalence_audit(&p).unwrap().is_poisson());
    }
}
