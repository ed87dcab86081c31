use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{int, Poly, Rational};
use crate::error::{Error, Result};

/// Exact rational function in normal form.
///
/// The numerator and denominator are fully expanded, share no common factor,
/// and the denominator has leading coefficient one under the graded-lex
/// order. Two `Expr`s are mathematically equal iff they are `==`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn var(index: usize) -> Self {
        Expr::from_poly(Poly::var(index))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Expr::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.constant_value() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Expr::normalized(num, den)
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = lc.recip();
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Number of monomials in numerator plus denominator.
    pub fn size(&self) -> usize {
        self.num.n_terms() + self.den.n_terms()
    }

    pub fn width(&self) -> usize {
        self.num.width().max(self.den.width())
    }

    pub fn recip(&self) -> Result<Expr> {
        Expr::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn powi(&self, n: i32) -> Result<Expr> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let e = n.unsigned_abs();
        Ok(Expr {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    pub fn derivative(&self, var: usize) -> Expr {
        if self.is_polynomial() {
            return Expr::from_poly(self.num.derivative(var));
        }
        // (n/d)' = (n' d - n d') / d^2; any common factor of the result with
        // d^2 already divides d, so reducing against d suffices.
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        if top.is_zero() {
            return Expr::zero();
        }
        let g = gcd(&top, &self.den);
        let top = top.div_exact(&g).expect("gcd divides");
        let den = &self.den * &self.den.div_exact(&g).expect("gcd divides");
        Expr::normalized(top, den)
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.eval_exact(point)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval_exact(point)? / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        let d = self.den.eval_f64(point)?;
        if d == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval_f64(point)? / d)
    }

    /// Renders with the given variable names, in a form the parser accepts.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Named<'a> {
        Named { expr: self, names }
    }
}

pub struct Named<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |i: usize| {
            self.names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i))
        };
        let e = self.expr;
        if e.is_polynomial() {
            return e.num.fmt_with(f, &names);
        }
        let wrap = |p: &Poly| p.n_terms() > 1 || p.leading().is_some_and(|(_, c)| *c < Rational::zero());
        if wrap(&e.num) {
            write!(f, "(")?;
            e.num.fmt_with(f, &names)?;
            write!(f, ")")?;
        } else {
            e.num.fmt_with(f, &names)?;
        }
        write!(f, "/(")?;
        e.den.fmt_with(f, &names)?;
        write!(f, ")")
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.width()).map(|i| format!("u{}", i + 1)).collect();
        let shown = self.display(&names).to_string();
        f.write_str(&shown)
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from_poly(p)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return Expr::from_poly(num);
            }
            return Expr::reduce(num, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let bq = self.den.div_exact(&g).expect("gcd divides");
        let dq = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &dq) + &(&rhs.num * &bq);
        let den = &self.den * &dq;
        if num.is_zero() {
            return Expr::zero();
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            Expr::normalized(num, den)
        } else {
            Expr::normalized(
                num.div_exact(&h).expect("gcd divides"),
                den.div_exact(&h).expect("gcd divides"),
            )
        }
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return Expr::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = rhs.den.div_exact(&g1).expect("gcd divides");
        let c = rhs.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        Expr::normalized(&a * &c, &b * &d)
    }
}

impl Div for &Expr {
    type Output = Expr;
    /// Panics on a zero divisor; use [`Expr::checked_div`] when that can occur.
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by the zero expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}
