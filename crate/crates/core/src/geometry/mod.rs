//! Pseudo-Riemannian geometry over exact rational functions.
//!
//! Index conventions: `Γ[[i, j, k]]` is Γ^i_{jk}; `R[[i, j, k, l]]` is
//! R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{ks}Γ^s_{lj} − Γ^i_{ls}Γ^s_{kj};
//! `b[[i, j, k]]` is b^{ij}_k = −g^{is}Γ^j_{sk}. In this convention a space of
//! constant curvature K has R^i_{jkl} = K(δ^i_k g_{jl} − δ^i_l g_{jk}).

mod canonical;

pub use canonical::{canonical_metric, CanonicalMetric};

use crate::expr::{guarded, Expr, Rational};
use crate::tensor::{Matrix, Tensor3, Tensor4};
use crate::{Error, Result};

/// g^{ij}: upper-index metric.
pub type ContravariantMetric = Matrix;
/// g_{ij}: lower-index metric.
pub type CovariantMetric = Matrix;

/// Mutually inverse contravariant and covariant metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub contra: ContravariantMetric,
    pub cov: CovariantMetric,
}

impl Metric {
    pub fn from_contravariant(g: ContravariantMetric) -> Result<Self> {
        check_symmetric(&g)?;
        let cov = invert_metric(&g)?;
        Ok(Metric { contra: g, cov })
    }

    pub fn from_covariant(g: CovariantMetric) -> Result<Self> {
        check_symmetric(&g)?;
        let contra = invert_metric(&g)?;
        Ok(Metric { contra, cov: g })
    }

    pub fn dim(&self) -> usize {
        self.contra.dim()
    }

    pub fn christoffel(&self) -> Result<Connection> {
        guarded(|| Ok(levi_civita(self)))
    }

    pub fn riemann(&self) -> Result<Tensor4> {
        let conn = self.christoffel()?;
        guarded(|| Ok(curvature(&conn.gamma)))
    }

    /// R^i_{jkl} − K(δ^i_k g_{jl} − δ^i_l g_{jk}) for every index tuple.
    pub fn constant_curvature_residual(&self, k: &Rational) -> Result<Tensor4> {
        let r = self.riemann()?;
        let k = Expr::constant(k.clone());
        guarded(|| Ok(curvature_residual(&r, &self.cov, &k)))
    }
}

fn check_symmetric(g: &Matrix) -> Result<()> {
    if g.is_symmetric() {
        Ok(())
    } else {
        Err(Error::Dimension("metric is not symmetric".into()))
    }
}

/// Exact inverse of a metric (either index position).
pub fn invert_metric(g: &Matrix) -> Result<Matrix> {
    g.inverse()
}

/// Levi-Civita connection in both index forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    /// Γ^i_{jk}
    pub gamma: Tensor3,
    /// b^{ij}_k = −g^{is}Γ^j_{sk}
    pub b: Tensor3,
}

pub fn christoffel(g_cov: &CovariantMetric) -> Result<Connection> {
    Metric::from_covariant(g_cov.clone())?.christoffel()
}

pub fn riemann(g_cov: &CovariantMetric) -> Result<Tensor4> {
    Metric::from_covariant(g_cov.clone())?.riemann()
}

pub fn constant_curvature_residual(g: &ContravariantMetric, k: &Rational) -> Result<Tensor4> {
    Metric::from_contravariant(g.clone())?.constant_curvature_residual(k)
}

/// `b^{ij}_k = −g^{is}Γ^j_{sk}` for the Levi-Civita connection of `g^{ij}`.
pub fn contravariant_connection(g: &ContravariantMetric) -> Result<Tensor3> {
    Ok(Metric::from_contravariant(g.clone())?.christoffel()?.b)
}

fn levi_civita(m: &Metric) -> Connection {
    let n = m.dim();
    // dg[[s, j, k]] = ∂_k g_{sj}
    let dg = Tensor3::par_from_fn(n, |s, j, k| m.cov[[s, j]].derivative(k));
    // first kind: Γ_{s,jk}
    let first = Tensor3::par_from_fn(n, |s, j, k| {
        let t = &(&dg[[s, k, j]] + &dg[[s, j, k]]) - &dg[[j, k, s]];
        t.scale(&Rational::new(1.into(), 2.into()))
    });
    let gamma = Tensor3::par_from_fn(n, |i, j, k| {
        (0..n)
            .filter(|&s| !m.contra[[i, s]].is_zero())
            .map(|s| &m.contra[[i, s]] * &first[[s, j, k]])
            .sum()
    });
    let b = Tensor3::par_from_fn(n, |i, j, k| {
        -(0..n)
            .filter(|&s| !m.contra[[i, s]].is_zero())
            .map(|s| &m.contra[[i, s]] * &gamma[[j, s, k]])
            .sum::<Expr>()
    });
    Connection { gamma, b }
}

fn curvature(gamma: &Tensor3) -> Tensor4 {
    let n = gamma.dim();
    Tensor4::par_from_fn(n, |i, j, k, l| {
        if k == l {
            return Expr::zero();
        }
        let mut r = &gamma[[i, l, j]].derivative(k) - &gamma[[i, k, j]].derivative(l);
        for s in 0..n {
            r = r + &gamma[[i, k, s]] * &gamma[[s, l, j]] - &gamma[[i, l, s]] * &gamma[[s, k, j]];
        }
        r
    })
}

fn curvature_residual(r: &Tensor4, cov: &Matrix, k: &Expr) -> Tensor4 {
    let n = r.dim();
    Tensor4::par_from_fn(n, |i, j, kk, l| {
        let mut model = Expr::zero();
        if i == kk {
            model = model + &cov[[j, l]];
        }
        if i == l {
            model = model - &cov[[j, kk]];
        }
        &r[[i, j, kk, l]] - &(k * &model)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, parse_expr, rat};
    use crate::tensor::Matrix;

    fn u(i: usize) -> Expr {
        Expr::var(i)
    }

    fn sphere_like(mu: &[[i64; 2]; 2], k: i64) -> Matrix {
        Matrix::from_fn(2, |i, j| Expr::int(mu[i][j]) - Expr::int(k) * u(i) * u(j))
    }

    #[test]
    fn constant_metric_is_flat() {
        let eta = Matrix::from_fn(2, |i, j| if i == j { Expr::int(i as i64 + 2) } else { Expr::zero() });
        let m = Metric::from_contravariant(eta).unwrap();
        assert_eq!(m.cov[[0, 0]], Expr::constant(rat(1, 2)));
        assert_eq!(m.cov[[1, 1]], Expr::constant(rat(1, 3)));
        assert!(m.christoffel().unwrap().gamma.is_zero());
        assert!(m.riemann().unwrap().is_zero());
        assert!(m.constant_curvature_residual(&int(0)).unwrap().is_zero());
    }

    #[test]
    fn one_component_christoffel() {
        let g = Matrix::from_fn(1, |_, _| Expr::one() - u(0) * u(0));
        let conn = Metric::from_contravariant(g).unwrap().christoffel().unwrap();
        let expected = parse_expr("u1/(1 - u1^2)", &["u1"]).unwrap();
        assert_eq!(conn.gamma[[0, 0, 0]], expected);
    }

    #[test]
    fn shifted_metric_connection() {
        for k in [1, -2] {
            let g = sphere_like(&[[2, 1], [1, 3]], k);
            let b = contravariant_connection(&g).unwrap();
            for (idx, e) in b.entries() {
                let [i, j, kk] = idx;
                let expected = if i == kk { -(Expr::int(k) * u(j)) } else { Expr::zero() };
                assert_eq!(*e, expected, "b[{i}{j}{kk}]");
            }
        }
    }

    #[test]
    fn unit_sphere_sign_convention() {
        let g = sphere_like(&[[1, 0], [0, 1]], 1);
        assert!(constant_curvature_residual(&g, &int(1)).unwrap().is_zero());
        assert!(!constant_curvature_residual(&g, &int(-1)).unwrap().is_zero());
    }

    #[test]
    fn flat_metric_fails_curved_residual() {
        let g = Matrix::identity(2);
        assert!(!constant_curvature_residual(&g, &int(1)).unwrap().is_zero());
    }

    #[test]
    fn bianchi_and_antisymmetry() {
        let names = ["u1", "u2"];
        let g = Matrix::from_rows(vec![
            vec![parse_expr("1 + u1^2", &names).unwrap(), parse_expr("u2", &names).unwrap()],
            vec![parse_expr("u2", &names).unwrap(), parse_expr("2 + u1*u2", &names).unwrap()],
        ])
        .unwrap();
        let r = Metric::from_contravariant(g).unwrap().riemann().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let cyc = &(&r[[i, j, k, l]] + &r[[i, k, l, j]]) + &r[[i, l, j, k]];
                        assert!(cyc.is_zero());
                        assert_eq!(r[[i, j, k, l]], -&r[[i, j, l, k]]);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let g = Matrix::from_fn(2, |i, j| u(i) * u(j));
        assert_eq!(Metric::from_contravariant(g), Err(Error::DegenerateMetric));
    }
}
