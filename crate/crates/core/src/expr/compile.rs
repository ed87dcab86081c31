use num_traits::ToPrimitive;

use super::poly::Poly;
use super::rational::Expr;

#[derive(Debug, Clone)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Poly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| {
                    (
                        c.to_f64().unwrap_or(f64::NAN),
                        m.vars().map(|(v, e)| (v, e as i32)).collect(),
                    )
                })
                .collect(),
        }
    }

    #[inline]
    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(v, e) in vars {
                t *= if e == 1 { x[v] } else { x[v].powi(e) };
            }
            acc += t;
        }
        acc
    }
}

/// Floating-point evaluator for an [`Expr`], for grid-point loops.
///
/// Panics if `x` is shorter than the expression's variable count.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den: Option<CompiledPoly>,
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> Self {
        CompiledExpr {
            num: CompiledPoly::new(e.numerator()),
            den: (!e.is_polynomial()).then(|| CompiledPoly::new(e.denominator())),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.num.eval(x);
        match &self.den {
            None => n,
            Some(d) => n / d.eval(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse::parse_expr;

    #[test]
    fn matches_exact_evaluation() {
        let e = parse_expr("(u1^3 - 2*u1*u2 + 1/3)/(1 + u2^2)", &["u1", "u2"]).unwrap();
        let c = CompiledExpr::new(&e);
        let x = [0.3, -0.7];
        let exact = e.eval_f64(&x).unwrap();
        assert!((c.eval(&x) - exact).abs() < 1e-15);
    }
}
