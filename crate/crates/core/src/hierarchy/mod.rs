//! The bi-Hamiltonian hierarchy of a canonical compatible pair.
//!
//! P₂ = η^{ij} d/dx is the constant operator, P₁ the nonlocal operator built
//! from the potentials. Every flow v^i_t = (F^i(v))_x is carried in three
//! forms: the flux F, the density S with ∂S/∂v^j = η_{jl}F^l, and the
//! expanded matrix V^i_k = ∂F^i/∂v^k.
//!
//! Flow variables are u1..uN as everywhere else; `flow_names` renders them as
//! v1..vN.

use num_traits::Zero;
use serde::Serialize;

use crate::bracket::{
    build_canonical, functional_bracket_density, is_total_x_derivative, CanonicalPair, ConstantBracket,
    HydroBracket, PoissonReport,
};
use crate::expr::{guarded, Expr, Rational, DEFAULT_SEED};
use crate::tensor::{Matrix, Tensor3};
use crate::{Error, Result};

mod commute;

pub use commute::{commute_check, commute_check_seeded};

/// v^i_t = (F^i)_x
#[derive(Clone, Debug, PartialEq)]
pub struct ConservativeFlow {
    pub f: Vec<Expr>,
    pub s: Expr,
    pub v: Matrix,
}

impl ConservativeFlow {
    pub fn dim(&self) -> usize {
        self.f.len()
    }

    /// Checks V = ∂F, symmetry of η_{jl}V^l_k and ∂_jS = η_{jl}F^l.
    pub fn check_invariants(&self, eta: &ConstantBracket) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for k in 0..n {
                if self.v[[i, k]] != self.f[i].derivative(k) {
                    return Err(Error::Inconsistency(format!("V^{}_{} is not ∂F^{}/∂v^{}", i + 1, k + 1, i + 1, k + 1)));
                }
            }
        }
        let lowered = lower(eta, &self.v);
        if !lowered.is_symmetric() {
            return Err(Error::Inconsistency("η·V is not symmetric".into()));
        }
        for j in 0..n {
            let target: Expr = (0..n).map(|l| self.f[l].scale(eta.lower(j, l))).sum();
            if self.s.derivative(j) != target {
                return Err(Error::Inconsistency(format!("∂S/∂v^{} differs from (ηF)_{}", j + 1, j + 1)));
            }
        }
        Ok(())
    }
}

/// η_{jl}M^l_k
fn lower(eta: &ConstantBracket, m: &Matrix) -> Matrix {
    let n = m.dim();
    Matrix::from_fn(n, |j, k| (0..n).map(|l| m[[l, k]].scale(eta.lower(j, l))).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Operator {
    /// η^{ij} d/dx
    P2,
    /// the nonlocal operator built from the potentials
    P1,
}

/// A zeroth-order density ∫d(v) dx, tagged with the operator it generates a
/// flow for.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianDensity {
    pub density: Expr,
    pub operator: Operator,
}

/// v^i_t = v^i_x
pub fn translation_flow(eta: &ConstantBracket) -> ConservativeFlow {
    let n = eta.dim();
    ConservativeFlow {
        f: (0..n).map(Expr::var).collect(),
        s: eta.momentum_density(),
        v: Matrix::identity(n),
    }
}

/// Expanded matrix of the Hamiltonian flow of ∫d dx under one operator. For
/// P₁ the nonlocal tail uses (d/dx)^{-1}(v^j_x ∂_jd) = d(v) − d(0).
pub fn hamiltonian_flow(p: &CanonicalPair, density: &HamiltonianDensity) -> Result<Matrix> {
    let n = p.dim();
    let d = &density.density;
    guarded(|| {
        let grad: Vec<Expr> = (0..n).map(|j| d.derivative(j)).collect();
        let hess = Matrix::from_fn(n, |j, k| grad[j].derivative(k));
        Ok(match density.operator {
            Operator::P2 => {
                Matrix::from_fn(n, |i, k| (0..n).map(|j| hess[[j, k]].scale(p.eta.upper(i, j))).sum())
            }
            Operator::P1 => {
                let d0 = d.eval_exact(&vec![Rational::zero(); n])?;
                let tail = &Expr::constant(p.k.clone()) * &(d - &Expr::constant(d0));
                recursion_matrix(&build_canonical(p), &hess, &grad, &tail)
            }
        })
    })
}

/// g^{ij}M_{jk} + b^{ij}_k N_j + T δ^i_k
fn recursion_matrix(b1: &HydroBracket, m: &Matrix, grad: &[Expr], tail: &Expr) -> Matrix {
    let n = b1.dim();
    Matrix::par_from_fn(n, |i, k| {
        let mut e = if i == k { tail.clone() } else { Expr::zero() };
        for j in 0..n {
            e = e + &b1.g[[i, j]] * &m[[j, k]] + &b1.b[[i, j, k]] * &grad[j];
        }
        e
    })
}

/// Ray integral of the rows of a closed matrix of 1-forms.
fn integrate_rows(v: &Matrix, at_origin: &[Rational], what: &str) -> Result<Vec<Expr>> {
    let n = v.dim();
    (0..n)
        .map(|i| {
            for k in 0..n {
                for l in k + 1..n {
                    if v[[i, k]].derivative(l) != v[[i, l]].derivative(k) {
                        return Err(Error::NotClosed(format!(
                            "{what}: row {} is not a gradient (components {}, {})",
                            i + 1,
                            k + 1,
                            l + 1
                        )));
                    }
                }
            }
            let mut acc = crate::expr::Poly::constant(at_origin[i].clone());
            for k in 0..n {
                let p = v[[i, k]].as_poly().ok_or_else(|| {
                    Error::Unsupported(format!("{what}: integrating a non-polynomial flux"))
                })?;
                acc = &acc + &p.ray_integral(k);
            }
            Ok(Expr::from_poly(acc))
        })
        .collect()
}

fn density_from_flux(eta: &ConstantBracket, f: &[Expr], what: &str) -> Result<Expr> {
    let n = f.len();
    let omega = Matrix::from_fn(n, |row, j| {
        if row == 0 {
            (0..n).map(|l| f[l].scale(eta.lower(j, l))).sum()
        } else {
            Expr::zero()
        }
    });
    Ok(integrate_rows(&omega, &vec![Rational::zero(); n], what)?.swap_remove(0))
}

/// One application of the recursion operator P₁P₂⁻¹. `gauge` is the constant
/// covector added to η·F̂, so F̂(0) = η⁻¹·gauge; Ŝ(0) = 0.
pub fn apply_recursion(p: &CanonicalPair, flow: &ConservativeFlow, gauge: &[Rational]) -> Result<ConservativeFlow> {
    let n = p.dim();
    if gauge.len() != n || flow.dim() != n {
        return Err(Error::Dimension("gauge and flow must have N components".into()));
    }
    guarded(|| {
        let grad: Vec<Expr> = (0..n).map(|j| flow.s.derivative(j)).collect();
        let hess = Matrix::from_fn(n, |j, k| grad[j].derivative(k));
        let tail = &Expr::constant(p.k.clone()) * &flow.s;
        let v = recursion_matrix(&build_canonical(p), &hess, &grad, &tail);
        let f = integrate_rows(&v, &p.eta.raise(gauge), "recursion")?;
        if !lower(&p.eta, &v).is_symmetric() {
            return Err(Error::NotClosed("recursion: η·V̂ is not symmetric".into()));
        }
        let s = density_from_flux(&p.eta, &f, "recursion")?;
        Ok(ConservativeFlow { f, s, v })
    })
}

/// Closed form of the first flow
/// F^i = h^i + η^{is}∂_sh^j η_{jl}v^l − (K/2)(η_{sk}v^sv^k)v^i,
/// S = η_{jk}h^kv^j − (K/8)(η_{jk}v^jv^k)².
pub fn flow_t1(p: &CanonicalPair) -> Result<ConservativeFlow> {
    let n = p.dim();
    guarded(|| {
        let grad = p.gradient();
        let kk = Expr::constant(p.k.clone());
        let half_k = kk.scale(&Rational::new(1.into(), 2.into()));
        let quad = p.eta.momentum_density().scale(&Rational::from_integer(2.into()));
        let eta_v: Vec<Expr> = (0..n)
            .map(|j| (0..n).map(|l| Expr::var(l).scale(p.eta.lower(j, l))).sum())
            .collect();
        let f: Vec<Expr> = (0..n)
            .map(|i| {
                let mut e = p.h[i].clone();
                for s in 0..n {
                    for j in 0..n {
                        e = e + &(&grad[[j, s]] * &eta_v[j]).scale(p.eta.upper(i, s));
                    }
                }
                e - &half_k * &(&quad * &Expr::var(i))
            })
            .collect();
        let s: Expr = (0..n).map(|j| &eta_v[j] * &p.h[j]).sum::<Expr>()
            - (&quad * &quad).scale(&(&p.k / Rational::from_integer(8.into())));
        let v = t1_expanded(p);
        if (0..n).any(|i| (0..n).any(|k| v[[i, k]] != f[i].derivative(k))) {
            return Err(Error::Inconsistency("first flow: expanded form differs from ∂F".into()));
        }
        Ok(ConservativeFlow { f, s, v })
    })
}

/// Middle form of the first flow:
/// η^{is}∂_sh^jη_{jk} + ∂_kh^i + η^{is}η_{jl}∂_s∂_kh^j v^l − Kη_{sk}v^iv^s − (K/2)δ^i_kη_{sl}v^sv^l.
fn t1_expanded(p: &CanonicalPair) -> Matrix {
    let n = p.dim();
    let grad = p.gradient();
    let hess = p.hessian();
    let kk = Expr::constant(p.k.clone());
    let quad = p.eta.momentum_density().scale(&Rational::from_integer(2.into()));
    Matrix::from_fn(n, |i, k| {
        let mut e = grad[[i, k]].clone();
        for s in 0..n {
            for j in 0..n {
                let c = p.eta.upper(i, s) * p.eta.lower(j, k);
                e = e + grad[[j, s]].scale(&c);
                for l in 0..n {
                    let c = p.eta.upper(i, s) * p.eta.lower(j, l);
                    e = e + (&hess[[j, s, k]] * &Expr::var(l)).scale(&c);
                }
            }
            e = e - (&kk * &(Expr::var(i) * Expr::var(s))).scale(p.eta.lower(s, k));
        }
        if i == k {
            e = e - (&kk * &quad).scale(&Rational::new(1.into(), 2.into()));
        }
        e
    })
}

/// Residuals between the three forms of the first flow: the operator form
/// P₁ applied to the momentum gradient, the expanded form, and ∂F.
pub fn t1_form_residuals(p: &CanonicalPair) -> Result<PoissonReport> {
    let n = p.dim();
    let t1 = flow_t1(p)?;
    let expanded = t1_expanded(p);
    let operator = hamiltonian_flow(
        p,
        &HamiltonianDensity { density: p.eta.momentum_density(), operator: Operator::P1 },
    )?;
    let gradient = Matrix::from_fn(n, |i, k| t1.f[i].derivative(k));
    let mut report = PoissonReport::default();
    let r1 = expanded.zip_with(&gradient, |a, b| a - b);
    let r2 = operator.zip_with(&gradient, |a, b| a - b);
    report
        .conditions
        .push(crate::bracket::condition_from("expanded-vs-gradient", r1.entries(), n, DEFAULT_SEED));
    report
        .conditions
        .push(crate::bracket::condition_from("operator-vs-gradient", r2.entries(), n, DEFAULT_SEED));
    Ok(report)
}

/// The second flow from its expanded closed form
/// V^i_k = g^{ij}M_{jk} + b^{ij}_kN_j + Kδ^i_k S₁ with N = η·F₁, M = ∂N,
/// cross-checked against one recursion step from the first flow with gauge
/// η·h(0). F(0) = h(0).
pub fn flow_t2(p: &CanonicalPair) -> Result<ConservativeFlow> {
    let n = p.dim();
    let flow = guarded(|| {
        let grad = p.gradient();
        let hess = p.hessian();
        let kk = Expr::constant(p.k.clone());
        let u = Expr::var;
        let half = Rational::new(1.into(), 2.into());
        let quad = p.eta.momentum_density().scale(&Rational::from_integer(2.into()));
        let eta_v: Vec<Expr> = (0..n).map(|j| (0..n).map(|l| u(l).scale(p.eta.lower(j, l))).sum()).collect();
        // η_{rq}v^q ∂_j h^r
        let contracted: Vec<Expr> = (0..n).map(|j| (0..n).map(|r| &eta_v[r] * &grad[[r, j]]).sum()).collect();
        let m = Matrix::from_fn(n, |j, k| {
            let mut e = Expr::zero();
            for l in 0..n {
                e = e + grad[[l, k]].scale(p.eta.lower(j, l)) + grad[[l, j]].scale(p.eta.lower(l, k));
                e = e + &eta_v[l] * &hess[[l, j, k]];
            }
            e - &kk * &(&eta_v[j] * &eta_v[k]) - (&kk * &quad).scale(&(p.eta.lower(j, k) * &half))
        });
        let nn: Vec<Expr> = (0..n)
            .map(|j| {
                let mut e: Expr = (0..n).map(|l| p.h[l].scale(p.eta.lower(j, l))).sum();
                e = e + &contracted[j];
                e - (&kk * &(&eta_v[j] * &quad)).scale(&half)
            })
            .collect();
        let s1: Expr = (0..n).map(|j| &eta_v[j] * &p.h[j]).sum::<Expr>()
            - (&quad * &quad).scale(&(&p.k / Rational::from_integer(8.into())));
        let tail = &kk * &s1;
        let v = recursion_matrix(&build_canonical(p), &m, &nn, &tail);
        let f = integrate_rows(&v, &p.h_at_origin()?, "second flow")?;
        let s = density_from_flux(&p.eta, &f, "second flow")?;
        Ok(ConservativeFlow { f, s, v })
    })?;
    let t1 = flow_t1(p)?;
    let gauge = p.eta.lower_index(&p.h_at_origin()?);
    let via_recursion = apply_recursion(p, &t1, &gauge)?;
    if via_recursion != flow {
        return Err(Error::Inconsistency("second flow: closed form differs from the recursion step".into()));
    }
    Ok(flow)
}

/// Flows 0..=n_max by iterated recursion from the translation flow. The
/// gauge for level n is `gauges[n - 1]`, zero when absent.
pub fn hierarchy(p: &CanonicalPair, n_max: usize, gauges: &[Vec<Rational>]) -> Result<Vec<ConservativeFlow>> {
    let n = p.dim();
    let mut flows = vec![translation_flow(&p.eta)];
    for level in 1..=n_max {
        let gauge = gauges.get(level - 1).cloned().unwrap_or_else(|| vec![Rational::zero(); n]);
        let next = apply_recursion(p, flows.last().expect("nonempty"), &gauge)
            .map_err(|e| match e {
                Error::NotClosed(m) => Error::NotClosed(format!("level {level}: {m}")),
                other => other,
            })?;
        flows.push(next);
    }
    Ok(flows)
}

/// Checks that `flow` is Hamiltonian for P₂ with its own density S and for
/// P₁ with `p1_density` (the momentum ½η_{jl}v^jv^l for the first flow).
pub fn bihamiltonian_check(p: &CanonicalPair, flow: &ConservativeFlow, p1_density: &Expr) -> Result<PoissonReport> {
    let n = p.dim();
    let p2 = hamiltonian_flow(p, &HamiltonianDensity { density: flow.s.clone(), operator: Operator::P2 })?;
    let p1 = hamiltonian_flow(p, &HamiltonianDensity { density: p1_density.clone(), operator: Operator::P1 })?;
    let r2 = p2.zip_with(&flow.v, |a, b| a - b);
    let r1 = p1.zip_with(&flow.v, |a, b| a - b);
    let mut report = PoissonReport::default();
    report.conditions.push(crate::bracket::condition_from("P2-representation", r2.entries(), n, DEFAULT_SEED));
    report.conditions.push(crate::bracket::condition_from("P1-representation", r1.entries(), n, DEFAULT_SEED));
    Ok(report)
}

/// {∫d1, ∫d2} vanishes for the chosen operator of the pair.
pub fn involution_check(p: &CanonicalPair, d1: &Expr, d2: &Expr, op: Operator) -> Result<bool> {
    let b = match op {
        Operator::P1 => build_canonical(p),
        Operator::P2 => p.eta.as_bracket(),
    };
    Ok(is_total_x_derivative(&functional_bracket_density(&b, d1, d2)?))
}

/// ∫ρ dx is conserved by v_t = V v_x iff ∂_iρ V^i_k is closed.
pub fn is_conserved(flow: &ConservativeFlow, density: &Expr) -> bool {
    let n = flow.dim();
    let omega: Vec<Expr> = (0..n)
        .map(|k| (0..n).map(|i| &density.derivative(i) * &flow.v[[i, k]]).sum())
        .collect();
    is_total_x_derivative(&crate::bracket::XDensity { omega })
}

/// Stacks the matrices of a flow list as one tensor `[[level, i, k]]`; used
/// for uniform printing.
pub fn stack(flows: &[ConservativeFlow]) -> Vec<Tensor3> {
    flows
        .iter()
        .map(|f| Tensor3::from_fn(f.dim(), |_, i, k| f.v[[i, k]].clone()))
        .collect()
}
