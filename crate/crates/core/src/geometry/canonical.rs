use num_traits::Zero;

use super::Metric;
use crate::expr::{Expr, Rational};
use crate::tensor::Matrix;
use crate::{Error, Result};

/// The constant-curvature model g^{ij} = a^i δ^{ij} − K u^i u^j with its
/// closed-form inverse and determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalMetric {
    pub metric: Metric,
    pub det: Expr,
}

pub fn canonical_metric(a: &[Rational], k: &Rational) -> Result<CanonicalMetric> {
    let n = a.len();
    if n == 0 {
        return Err(Error::Dimension("canonical metric needs N >= 1".into()));
    }
    let zeros: Vec<usize> = (0..n).filter(|&i| a[i].is_zero()).collect();
    let n_zero = zeros.len() + usize::from(k.is_zero());
    if n_zero > 1 {
        return Err(Error::TooManyZeroConstants(n_zero));
    }
    let u = |i: usize| Expr::var(i);
    let kk = Expr::constant(k.clone());
    let contra = Matrix::from_fn(n, |i, j| {
        let diag = if i == j { Expr::constant(a[i].clone()) } else { Expr::zero() };
        diag - &kk * &(u(i) * u(j))
    });

    let (cov, det) = match zeros.first() {
        None => {
            // D = 1 − K Σ (u^s)^2 / a^s
            let d: Expr = Expr::one()
                - (0..n)
                    .map(|s| (u(s) * u(s)).scale(&(k / &a[s])))
                    .sum::<Expr>();
            let prod: Rational = a.iter().product();
            let det = d.scale(&prod);
            let cov = Matrix::from_fn(n, |i, j| {
                let diag = if i == j { Expr::constant(a[i].recip()) } else { Expr::zero() };
                let c = k / &(&a[i] * &a[j]);
                diag + (u(i) * u(j)).scale(&c) / &d
            });
            (cov, det)
        }
        Some(&m) => {
            let rest: Expr = Expr::one()
                - (0..n)
                    .filter(|&s| s != m)
                    .map(|s| (u(s) * u(s)).scale(&(k / &a[s])))
                    .sum::<Expr>();
            let um2 = u(m) * u(m);
            let cov = Matrix::from_fn(n, |i, j| match (i == m, j == m) {
                (true, true) => -(&rest / &(&kk * &um2)),
                (false, true) => -((u(i) / u(m)).scale(&a[i].recip())),
                (true, false) => -((u(j) / u(m)).scale(&a[j].recip())),
                (false, false) if i == j => Expr::constant(a[i].recip()),
                _ => Expr::zero(),
            });
            let prod: Rational = (0..n).filter(|&s| s != m).map(|s| a[s].clone()).product();
            let det = um2.scale(&-(k * &prod));
            (cov, det)
        }
    };
    Ok(CanonicalMetric { metric: Metric { contra, cov }, det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, rat};

    #[test]
    fn identity_when_flat() {
        let c = canonical_metric(&[int(1), int(1)], &int(0)).unwrap();
        assert_eq!(c.metric.contra, Matrix::identity(2));
        assert_eq!(c.metric.cov, Matrix::identity(2));
        assert!(c.det.is_one());
    }

    #[test]
    fn closed_forms_match_direct_computation() {
        for (a, k) in [
            (vec![int(1), int(2)], int(1)),
            (vec![rat(-1, 2), int(3), int(5)], rat(2, 3)),
            (vec![int(2), int(-1), rat(1, 3), int(1)], int(-1)),
        ] {
            let c = canonical_metric(&a, &k).unwrap();
            assert_eq!(c.metric.contra.det(), c.det);
            assert_eq!(c.metric.contra.matmul(&c.metric.cov), Matrix::identity(a.len()));
        }
    }

    #[test]
    fn determinant_values() {
        let c = canonical_metric(&[int(1), int(2)], &int(1)).unwrap();
        assert_eq!(c.det.eval_exact(&[int(1), int(1)]).unwrap(), int(-1));
        let c = canonical_metric(&[int(1), int(1)], &int(1)).unwrap();
        assert_eq!(c.det.eval_exact(&[rat(1, 2), rat(1, 2)]).unwrap(), rat(1, 2));
    }

    #[test]
    fn degenerate_model() {
        let c = canonical_metric(&[int(0), int(1)], &int(1)).unwrap();
        assert_eq!(c.det.eval_exact(&[rat(1, 2), rat(1, 3)]).unwrap(), rat(-1, 4));
        assert_eq!(c.metric.contra.det(), c.det);
        assert_eq!(c.metric.contra.inverse().unwrap(), c.metric.cov);
        let c = canonical_metric(&[int(2), int(-3), int(0)], &rat(1, 2)).unwrap();
        assert_eq!(c.metric.contra.inverse().unwrap(), c.metric.cov);
    }

    #[test]
    fn too_many_zeros() {
        assert_eq!(
            canonical_metric(&[int(0), int(1)], &int(0)),
            Err(Error::TooManyZeroConstants(2))
        );
        assert!(canonical_metric(&[int(0), int(0)], &int(1)).is_err());
    }

    #[test]
    fn geodesic_at_origin() {
        let c = canonical_metric(&[int(2), int(-1), int(3)], &rat(3, 2)).unwrap();
        let conn = c.metric.christoffel().unwrap();
        for (_, e) in conn.gamma.entries() {
            assert!(e.eval_exact(&[int(0), int(0), int(0)]).unwrap().is_zero());
        }
    }

    #[test]
    fn levi_civita_compatibility() {
        let c = canonical_metric(&[int(1), int(-2), rat(1, 2)], &int(2)).unwrap();
        let g = &c.metric.cov;
        let gamma = c.metric.christoffel().unwrap().gamma;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut r = g[[i, j]].derivative(k);
                    for s in 0..3 {
                        r = r - &gamma[[s, k, i]] * &g[[s, j]] - &gamma[[s, k, j]] * &g[[i, s]];
                    }
                    assert!(r.is_zero());
                }
            }
        }
    }

    #[test]
    fn constant_curvature() {
        for (a, k) in [(vec![int(1), int(3)], int(2)), (vec![int(0), int(1)], int(1))] {
            let c = canonical_metric(&a, &k).unwrap();
            assert!(c.metric.constant_curvature_residual(&k).unwrap().is_zero());
            assert!(!c.metric.constant_curvature_residual(&(&k + int(1))).unwrap().is_zero());
        }
    }
}
