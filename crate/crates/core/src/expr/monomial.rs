use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Power product `x0^e0 * x1^e1 * ...` stored as a dense exponent vector with
/// trailing zeros trimmed, so equal monomials have equal representations.
///
/// Ordered graded-lexicographically: higher total degree is greater, ties are
/// broken lexicographically with `x0 > x1 > x2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(index: usize) -> Self {
        Self::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        let mut v = SmallVec::from_elem(0, index + 1);
        v[index] = exp;
        Monomial(v).trimmed()
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps)).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of variable slots in use (highest variable index + 1).
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.0.clone();
        for (o, e) in out.iter_mut().zip(short.0.iter()) {
            *o += e;
        }
        Monomial(out)
    }

    pub fn pow(&self, n: u32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|e| e * n).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut out = self.0.clone();
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            if *o < *e {
                return None;
            }
            *o -= e;
        }
        Some(Monomial(out).trimmed())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        Monomial((0..n).map(|i| self.0[i].min(other.0[i])).collect()).trimmed()
    }

    /// Drops variable `var`, returning its exponent and the remaining monomial.
    pub fn split_var(&self, var: usize) -> (u32, Monomial) {
        let e = self.exp(var);
        if e == 0 {
            return (0, self.clone());
        }
        let mut out = self.0.clone();
        out[var] = 0;
        (e, Monomial(out).trimmed())
    }

    pub fn with_var_exp(&self, var: usize, exp: u32) -> Monomial {
        let mut out = self.0.clone();
        if out.len() <= var {
            out.resize(var + 1, 0);
        }
        out[var] = exp;
        Monomial(out).trimmed()
    }

    pub fn vars(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| (i, *e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, e) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
