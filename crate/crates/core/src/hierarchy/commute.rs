use crate::bracket::{condition_from, PoissonReport};
use crate::expr::{guarded, Expr, DEFAULT_SEED};
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

pub fn commute_check(a: &Matrix, b: &Matrix) -> Result<PoissonReport> {
    commute_check_seeded(a, b, DEFAULT_SEED)
}

/// Commutator of v_t = A(v)v_x and v_s = B(v)v_x. The coefficient of v_xx
/// is AB − BA (`[i, k]`); the coefficient of v^k_x v^l_x, symmetrized in
/// (k, l), is `[i, k, l]`.
pub fn commute_check_seeded(a: &Matrix, b: &Matrix, seed: u64) -> Result<PoissonReport> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension("flow matrices differ in size".into()));
    }
    guarded(|| {
        let linear = a.matmul(b).zip_with(&b.matmul(a), |x, y| x - y);
        let da = Tensor3::from_fn(n, |i, k, m| a[[i, k]].derivative(m));
        let db = Tensor3::from_fn(n, |i, k, m| b[[i, k]].derivative(m));
        // c[[i, k, l]] = ∂_mA^i_k B^m_l + A^i_m ∂_kB^m_l − (A ↔ B)
        let c = Tensor3::par_from_fn(n, |i, k, l| {
            let mut e = Expr::zero();
            for m in 0..n {
                e = e + &da[[i, k, m]] * &b[[m, l]] + &a[[i, m]] * &db[[m, l, k]];
                e = e - &db[[i, k, m]] * &a[[m, l]] - &b[[i, m]] * &da[[m, l, k]];
            }
            e
        });
        let quadratic = Tensor3::from_fn(n, |i, k, l| &c[[i, k, l]] + &c[[i, l, k]]);
        let mut report = PoissonReport::default();
        report.conditions.push(condition_from("matrix-commutator", linear.entries(), n, seed));
        report.conditions.push(condition_from("quadratic-terms", quadratic.entries(), n, seed));
        Ok(report)
    })
}
