//! Nonlocal brackets of hydrodynamic type
//!
//! {I,J} = ∫ δI/δu^i ( g^{ij} d/dx + b^{ij}_k u^k_x + K u^i_x (d/dx)^{-1} u^j_x ) δJ/δu^j dx
//!
//! and the machinery for deciding when they are Poisson, when two of them are
//! compatible, and how compatible pairs with a constant partner are generated
//! from a vector of potentials.

mod canonical;
mod liouville;
mod poisson;
mod report;

pub use canonical::{
    build_canonical, check_canonical_equations, check_canonical_equations_seeded, equivalence_audit,
    AuditReport,
};
pub use liouville::{
    functional_bracket_density, involution_report, is_total_x_derivative, liouville_function,
    special_liouville, LiouvilleData, XDensity,
};
pub use poisson::{
    check_compat_constant, check_compat_constant_seeded, check_pencil, check_pencil_seeded, check_poisson,
    check_poisson_seeded, local_member, PencilReport,
};
pub(crate) use report::condition as condition_from;
pub use report::{Condition, PoissonReport, Witness};

use num_traits::Zero;

use crate::expr::{Expr, Rational};
use crate::geometry::{self, ContravariantMetric};
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

/// Coefficients (g^{ij}, b^{ij}_k, K) of a bracket; no Poisson property is
/// assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct HydroBracket {
    pub g: ContravariantMetric,
    /// `b[[i, j, k]]` = b^{ij}_k
    pub b: Tensor3,
    pub k: Rational,
}

impl HydroBracket {
    pub fn new(g: Matrix, b: Tensor3, k: Rational) -> Result<Self> {
        if g.dim() != b.dim() {
            return Err(Error::Dimension(format!(
                "metric is {0}x{0} but connection has dimension {1}",
                g.dim(),
                b.dim()
            )));
        }
        Ok(HydroBracket { g, b, k })
    }

    /// Bracket of a nondegenerate metric with its Levi-Civita connection,
    /// b^{ij}_k = −g^{is}Γ^j_{sk}.
    pub fn from_metric(g: ContravariantMetric, k: Rational) -> Result<Self> {
        let b = geometry::contravariant_connection(&g)?;
        Ok(HydroBracket { g, b, k })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn is_local(&self) -> bool {
        self.k.is_zero()
    }

    /// `c1·self + c2·other`
    pub fn combine(&self, c1: &Rational, other: &HydroBracket, c2: &Rational) -> HydroBracket {
        HydroBracket {
            g: self.g.zip_with(&other.g, |a, b| a.scale(c1) + b.scale(c2)),
            b: self.b.zip_with(&other.b, |a, b| a.scale(c1) + b.scale(c2)),
            k: c1 * &self.k + c2 * &other.k,
        }
    }
}

/// Constant nondegenerate symmetric η^{ij} with its inverse η_{ij}.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantBracket {
    upper: Vec<Vec<Rational>>,
    lower: Vec<Vec<Rational>>,
}

impl ConstantBracket {
    pub fn new(upper: Vec<Vec<Rational>>) -> Result<Self> {
        let n = upper.len();
        if n == 0 || upper.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("eta must be a nonempty square matrix".into()));
        }
        if (0..n).any(|i| (0..i).any(|j| upper[i][j] != upper[j][i])) {
            return Err(Error::Input("eta must be symmetric".into()));
        }
        let m = Matrix::from_fn(n, |i, j| Expr::constant(upper[i][j].clone()));
        let inv = m.inverse().map_err(|_| Error::Input("eta must be invertible".into()))?;
        let lower = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| inv[[i, j]].constant_value().expect("inverse of a constant matrix"))
                    .collect()
            })
            .collect();
        Ok(ConstantBracket { upper, lower })
    }

    pub fn identity(n: usize) -> Self {
        let upper = (0..n)
            .map(|i| (0..n).map(|j| Rational::from_integer(i64::from(i == j).into())).collect())
            .collect();
        ConstantBracket::new(upper).expect("identity is invertible")
    }

    pub fn diagonal(d: &[Rational]) -> Result<Self> {
        let n = d.len();
        ConstantBracket::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { Rational::zero() }).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    /// η^{ij}
    pub fn upper(&self, i: usize, j: usize) -> &Rational {
        &self.upper[i][j]
    }

    /// η_{ij}
    pub fn lower(&self, i: usize, j: usize) -> &Rational {
        &self.lower[i][j]
    }

    pub fn upper_rows(&self) -> &[Vec<Rational>] {
        &self.upper
    }

    pub fn upper_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), |i, j| Expr::constant(self.upper[i][j].clone()))
    }

    pub fn lower_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), |i, j| Expr::constant(self.lower[i][j].clone()))
    }

    /// η^{ij}ξ_j
    pub fn raise(&self, xi: &[Rational]) -> Vec<Rational> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| &self.upper[i][j] * &xi[j]).sum())
            .collect()
    }

    /// η_{ij}v^j
    pub fn lower_index(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| &self.lower[i][j] * &v[j]).sum())
            .collect()
    }

    /// The bracket (η, 0, 0).
    pub fn as_bracket(&self) -> HydroBracket {
        HydroBracket {
            g: self.upper_matrix(),
            b: Tensor3::zeros(self.dim()),
            k: Rational::zero(),
        }
    }

    /// ½η_{ij}u^iu^j
    pub fn momentum_density(&self) -> Expr {
        let n = self.dim();
        let half = Rational::new(1.into(), 2.into());
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.lower[i][j].is_zero())
            .map(|(i, j)| (Expr::var(i) * Expr::var(j)).scale(&(&self.lower[i][j] * &half)))
            .sum()
    }
}

/// Constant partner η, curvature constant K and potentials H^i generating a
/// compatible pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalPair {
    pub eta: ConstantBracket,
    pub k: Rational,
    pub h: Vec<Expr>,
}

impl CanonicalPair {
    pub fn new(eta: ConstantBracket, k: Rational, h: Vec<Expr>) -> Result<Self> {
        let n = eta.dim();
        if h.len() != n {
            return Err(Error::Dimension(format!("expected {n} potentials, got {}", h.len())));
        }
        if let Some(w) = h.iter().map(Expr::width).max().filter(|&w| w > n) {
            return Err(Error::Dimension(format!("potentials use variable u{w} but N = {n}")));
        }
        Ok(CanonicalPair { eta, k, h })
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// ∂H^j/∂u^s as `[[j, s]]`.
    pub fn gradient(&self) -> Matrix {
        Matrix::from_fn(self.dim(), |j, s| self.h[j].derivative(s))
    }

    /// ∂²H^j/∂u^s∂u^k as `[[j, s, k]]`.
    pub fn hessian(&self) -> Tensor3 {
        let grad = self.gradient();
        Tensor3::from_fn(self.dim(), |j, s, k| grad[[j, s]].derivative(k))
    }

    /// H^i(0)
    pub fn h_at_origin(&self) -> Result<Vec<Rational>> {
        let zero = vec![Rational::zero(); self.dim()];
        self.h.iter().map(|e| e.eval_exact(&zero)).collect()
    }
}
