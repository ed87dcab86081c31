use num_traits::Zero;

use super::{ConstantBracket, HydroBracket};
use crate::expr::{guarded, Expr, Prober, Rational, DEFAULT_SEED};
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleData {
    /// Φ^{ij} with b^{ij}_k = ∂_kΦ^{ij} − Kδ^i_k u^j and g = Φ + Φᵀ − Kuu.
    pub phi: Matrix,
    /// Potentials with η_{ks}Φ^{sj} = ∂_kH^j, H(0) = 0, when special.
    pub h: Option<Vec<Expr>>,
}

fn witness_text(e: &Expr, n: usize) -> String {
    match Prober::new(DEFAULT_SEED).nonzero_witness(e, n) {
        Ok((p, v)) => {
            let pt: Vec<String> = p.iter().map(|r| r.to_string()).collect();
            format!("residual {v} at u = ({})", pt.join(", "))
        }
        Err(_) => "residual not identically zero".into(),
    }
}

/// Integral of the 1-form ω_k du^k along the ray from the origin.
fn ray_integral(omega: &[Expr]) -> Result<Expr> {
    let mut out = crate::expr::Poly::zero();
    for (k, w) in omega.iter().enumerate() {
        let p = w.as_poly().ok_or_else(|| {
            Error::Unsupported("path integral of a non-polynomial 1-form".into())
        })?;
        out = &out + &p.ray_integral(k);
    }
    Ok(Expr::from_poly(out))
}

/// First (k, l) with ∂_lω_k ≠ ∂_kω_l, and the residual.
fn curl_failure(omega: &[Expr]) -> Option<(usize, usize, Expr)> {
    let n = omega.len();
    for k in 0..n {
        for l in k + 1..n {
            let c = &omega[k].derivative(l) - &omega[l].derivative(k);
            if !c.is_zero() {
                return Some((k, l, c));
            }
        }
    }
    None
}

/// Tests whether b^{ij}_k + Kδ^i_k u^j is a gradient in k and, if so,
/// recovers the Liouville function with Φ(0) = ½g(0).
pub fn liouville_function(b: &HydroBracket) -> Result<LiouvilleData> {
    guarded(|| {
        let n = b.dim();
        let kk = Expr::constant(b.k.clone());
        let a = Tensor3::from_fn(n, |i, j, k| {
            if i == k {
                &b.b[[i, j, k]] + &(&kk * &Expr::var(j))
            } else {
                b.b[[i, j, k]].clone()
            }
        });
        let mut phi = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let omega: Vec<Expr> = (0..n).map(|k| a[[i, j, k]].clone()).collect();
                if let Some((k, l, c)) = curl_failure(&omega) {
                    return Err(Error::NotClosed(format!(
                        "not Liouville: b^{{{}{}}} fails closedness in (k,l) = ({},{}), {}",
                        i + 1,
                        j + 1,
                        k + 1,
                        l + 1,
                        witness_text(&c, n)
                    )));
                }
                phi[[i, j]] = ray_integral(&omega)?;
            }
        }
        let origin = vec![Rational::zero(); n];
        let half = Rational::new(1.into(), 2.into());
        for i in 0..n {
            for j in 0..n {
                let g0 = b.g[[i, j]].eval_exact(&origin)?;
                phi[[i, j]] = &phi[[i, j]] + &Expr::constant(g0 * &half);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let model = &(&phi[[i, j]] + &phi[[j, i]]) - &(&kk * &(Expr::var(i) * Expr::var(j)));
                let r = &b.g[[i, j]] - &model;
                if !r.is_zero() {
                    return Err(Error::NotClosed(format!(
                        "not Liouville: g^{{{}{}}} differs from Φ + Φᵀ − Kuu, {}",
                        i + 1,
                        j + 1,
                        witness_text(&r, n)
                    )));
                }
            }
        }
        Ok(LiouvilleData { phi, h: None })
    })
}

/// Tests whether η_{ks}Φ^{sj} is a gradient in k for every j and, if so,
/// integrates the potentials H^j with H(0) = 0.
pub fn special_liouville(b: &HydroBracket, eta: &ConstantBracket) -> Result<LiouvilleData> {
    if eta.dim() != b.dim() {
        return Err(Error::Dimension("bracket and eta differ in dimension".into()));
    }
    let data = liouville_function(b)?;
    guarded(|| {
        let n = b.dim();
        let mut h = Vec::with_capacity(n);
        for j in 0..n {
            let omega: Vec<Expr> = (0..n)
                .map(|k| (0..n).map(|s| data.phi[[s, j]].scale(eta.lower(k, s))).sum())
                .collect();
            if let Some((k, l, c)) = curl_failure(&omega) {
                return Err(Error::NotClosed(format!(
                    "not special: η_(k s)Φ^(s {}) fails closedness in (k,l) = ({},{}), {}",
                    j + 1,
                    k + 1,
                    l + 1,
                    witness_text(&c, n)
                )));
            }
            h.push(ray_integral(&omega)?);
        }
        Ok(LiouvilleData { phi: data.phi, h: Some(h) })
    })
}

/// A first-order density ω_k(u)u^k_x.
#[derive(Clone, Debug, PartialEq)]
pub struct XDensity {
    pub omega: Vec<Expr>,
}

impl XDensity {
    /// The integrand is an exact x-derivative iff ω is closed.
    pub fn curl(&self) -> Option<(usize, usize, Expr)> {
        curl_failure(&self.omega)
    }
}

pub fn is_total_x_derivative(d: &XDensity) -> bool {
    d.curl().is_none()
}

/// Integrand of {∫f dx, ∫g dx} for zeroth-order densities, written as
/// ω_k u^k_x after dropping exact terms. The nonlocal tail is resolved with
/// (d/dx)^{-1}(u^j_x ∂_jg) = g(u) − g(0).
pub fn functional_bracket_density(b: &HydroBracket, f: &Expr, g: &Expr) -> Result<XDensity> {
    let n = b.dim();
    if f.width() > n || g.width() > n {
        return Err(Error::Unsupported("densities must depend on u1..uN only".into()));
    }
    guarded(|| {
        let df: Vec<Expr> = (0..n).map(|i| f.derivative(i)).collect();
        let dg: Vec<Expr> = (0..n).map(|j| g.derivative(j)).collect();
        let g0 = g.eval_exact(&vec![Rational::zero(); n])?;
        let tail = &Expr::constant(b.k.clone()) * &(g - &Expr::constant(g0));
        let omega = (0..n)
            .map(|k| {
                let mut w = &df[k] * &tail;
                for i in (0..n).filter(|&i| !df[i].is_zero()) {
                    let mut inner = Expr::zero();
                    for j in 0..n {
                        inner = inner + &b.g[[i, j]] * &dg[j].derivative(k) + &b.b[[i, j, k]] * &dg[j];
                    }
                    w = w + &df[i] * &inner;
                }
                w
            })
            .collect();
        Ok(XDensity { omega })
    })
}

/// Pairwise involution of the given densities: `(a, b, in_involution)` for
/// every `a <= b`.
pub fn involution_report(b: &HydroBracket, densities: &[Expr]) -> Result<Vec<(usize, usize, bool)>> {
    let mut out = Vec::new();
    for i in 0..densities.len() {
        for j in i..densities.len() {
            let d = functional_bracket_density(b, &densities[i], &densities[j])?;
            out.push((i, j, is_total_x_derivative(&d)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{build_canonical, CanonicalPair};
    use crate::expr::{field_names, int, parse_expr, rat};

    fn pair(eta: ConstantBracket, k: Rational, h: &[&str]) -> CanonicalPair {
        let names = field_names(eta.dim());
        let h = h.iter().map(|s| parse_expr(s, &names).unwrap()).collect();
        CanonicalPair::new(eta, k, h).unwrap()
    }

    #[test]
    fn constant_bracket_phi_is_half_eta() {
        let eta = ConstantBracket::new(vec![vec![int(2), int(1)], vec![int(1), int(4)]]).unwrap();
        let data = special_liouville(&eta.as_bracket(), &eta).unwrap();
        assert_eq!(data.phi, eta.upper_matrix().scale(&rat(1, 2)));
        let h = data.h.unwrap();
        assert_eq!(h[0], Expr::var(0).scale(&rat(1, 2)));
        assert_eq!(h[1], Expr::var(1).scale(&rat(1, 2)));
    }

    #[test]
    fn canonical_bracket_round_trip() {
        let eta = ConstantBracket::diagonal(&[int(1), int(-1)]).unwrap();
        let p = pair(eta.clone(), int(0), &["u1^2*u2 + u2^3/3", "u1^3/3 + u1*u2^2"]);
        let b = build_canonical(&p);
        let data = special_liouville(&b, &eta).unwrap();
        let again = CanonicalPair::new(eta, p.k.clone(), data.h.unwrap()).unwrap();
        assert_eq!(build_canonical(&again), b);
    }

    #[test]
    fn curl_obstruction() {
        let mut b = Tensor3::zeros(2);
        b[[0, 0, 0]] = Expr::var(1);
        b[[0, 0, 1]] = -Expr::var(0);
        let br = HydroBracket::new(Matrix::identity(2), b, int(0)).unwrap();
        assert!(matches!(liouville_function(&br), Err(Error::NotClosed(_))));
    }

    #[test]
    fn liouville_but_not_special() {
        let mut phi = Matrix::zeros(2);
        phi[[0, 0]] = Expr::var(1);
        let g = phi.zip_with(&phi.transpose(), |a, b| a + b);
        let b = Tensor3::from_fn(2, |i, j, k| phi[[i, j]].derivative(k));
        let br = HydroBracket::new(g, b, int(0)).unwrap();
        assert_eq!(liouville_function(&br).unwrap().phi, phi);
        let err = special_liouville(&br, &ConstantBracket::identity(2)).unwrap_err();
        assert!(matches!(err, Error::NotClosed(ref m) if m.starts_with("not special")));
    }

    #[test]
    fn total_derivatives() {
        let u = |i| Expr::var(i);
        assert!(is_total_x_derivative(&XDensity { omega: vec![u(1), u(0)] }));
        assert!(!is_total_x_derivative(&XDensity { omega: vec![u(1), Expr::zero()] }));
    }

    #[test]
    fn annihilators_and_momentum_in_involution() {
        let eta = ConstantBracket::identity(2);
        let p = pair(eta.clone(), int(2), &["u1*u2", "u1^2/2 + u2^2/2"]);
        let b = build_canonical(&p);
        let mut dens = vec![Expr::var(0), Expr::var(1)];
        dens.push(eta.momentum_density());
        assert!(involution_report(&b, &dens).unwrap().iter().all(|t| t.2));
    }
}
