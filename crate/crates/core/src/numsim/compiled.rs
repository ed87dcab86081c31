use num_traits::ToPrimitive;

use super::{FieldState, Spectral};
use crate::bracket::{build_canonical, CanonicalPair, HydroBracket};
use crate::expr::CompiledExpr;
use crate::hierarchy::ConservativeFlow;
use crate::tensor::Matrix;
use crate::{Error, Result};

/// Floating-point evaluator of V(v) for v_t = V(v)v_x.
#[derive(Clone, Debug)]
pub struct CompiledFlow {
    n: usize,
    v: Vec<CompiledExpr>,
}

impl CompiledFlow {
    pub fn new(v: &Matrix) -> Self {
        let n = v.dim();
        let v = (0..n * n).map(|idx| CompiledExpr::new(&v[[idx / n, idx % n]])).collect();
        CompiledFlow { n, v }
    }

    pub fn from_flow(flow: &ConservativeFlow) -> Self {
        CompiledFlow::new(&flow.v)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// V^i_k at a point, row-major.
    pub fn matrix_at(&self, point: &[f64]) -> Vec<f64> {
        self.v.iter().map(|e| e.eval(point)).collect()
    }

    /// Largest Gershgorin row bound of V over the grid.
    pub fn speed_bound(&self, state: &FieldState) -> f64 {
        let n = self.n;
        (0..state.points())
            .map(|m| {
                let a = self.matrix_at(&state.at(m));
                (0..n).map(|i| a[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// V(v)v_x on the grid.
    pub fn rhs(&self, spectral: &Spectral, state: &FieldState) -> Vec<Vec<f64>> {
        let n = self.n;
        let vx: Vec<Vec<f64>> = state.fields.iter().map(|f| spectral.dx(f)).collect();
        let mut out = vec![vec![0.0; state.points()]; n];
        for m in 0..state.points() {
            let a = self.matrix_at(&state.at(m));
            for i in 0..n {
                out[i][m] = (0..n).map(|k| a[i * n + k] * vx[k][m]).sum();
            }
        }
        out
    }
}

/// Floating-point evaluator of a bracket's coefficients.
#[derive(Clone, Debug)]
pub struct CompiledBracket {
    n: usize,
    g: Vec<CompiledExpr>,
    b: Vec<CompiledExpr>,
    k: f64,
}

impl CompiledBracket {
    pub fn new(br: &HydroBracket) -> Self {
        let n = br.dim();
        CompiledBracket {
            n,
            g: (0..n * n).map(|idx| CompiledExpr::new(&br.g[[idx / n, idx % n]])).collect(),
            b: (0..n * n * n)
                .map(|idx| CompiledExpr::new(&br.b[[idx / (n * n), (idx / n) % n, idx % n]]))
                .collect(),
            k: br.k.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn from_pair(p: &CanonicalPair) -> Self {
        CompiledBracket::new(&build_canonical(p))
    }
}

/// g^{ij}(ξ_j)_x + b^{ij}_k v^k_x ξ_j + K v^i_x (d/dx)^{-1}(v^j_x ξ_j), with
/// the mean-zero antiderivative.
pub fn apply_p1_numeric(
    br: &CompiledBracket,
    spectral: &Spectral,
    state: &FieldState,
    xi: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let n = br.n;
    if state.dim() != n || xi.len() != n || xi.iter().any(|c| c.len() != state.points()) {
        return Err(Error::Dimension("state and covector must have N components on the grid".into()));
    }
    let mpts = state.points();
    let vx: Vec<Vec<f64>> = state.fields.iter().map(|f| spectral.dx(f)).collect();
    let xix: Vec<Vec<f64>> = xi.iter().map(|f| spectral.dx(f)).collect();
    let pairing: Vec<f64> = (0..mpts).map(|m| (0..n).map(|j| vx[j][m] * xi[j][m]).sum()).collect();
    let tail = spectral.antidx(&pairing)?;
    let mut out = vec![vec![0.0; mpts]; n];
    for m in 0..mpts {
        let p = state.at(m);
        for i in 0..n {
            let mut acc = br.k * vx[i][m] * tail[m];
            for j in 0..n {
                acc += br.g[i * n + j].eval(&p) * xix[j][m];
                for k in 0..n {
                    acc += br.b[(i * n + j) * n + k].eval(&p) * vx[k][m] * xi[j][m];
                }
            }
            out[i][m] = acc;
        }
    }
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite value in operator application".into()));
    }
    Ok(out)
}
