use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::parse::Ast;
use super::poly::Rational;
use super::rational::Expr;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const PROBE_POINTS: usize = 20;
pub const MAX_PROBE_ATTEMPTS: usize = 100;
pub const NUMERIC_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ZeroVerdict {
    Zero,
    NonZero,
    NumericallyZero,
}

impl ZeroVerdict {
    pub fn vanishes(self) -> bool {
        !matches!(self, ZeroVerdict::NonZero)
    }
}

/// Deterministic source of random rational probe points in `(-1, 1)^n`.
pub struct Prober {
    rng: ChaCha8Rng,
}

impl Prober {
    pub fn new(seed: u64) -> Self {
        Prober {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rational_point(&mut self, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|_| {
                let q: i64 = self.rng.random_range(2..=97);
                let p: i64 = self.rng.random_range(-(q - 1)..=(q - 1));
                BigRational::new(BigInt::from(p), BigInt::from(q))
            })
            .collect()
    }

    /// Finds a point where `e` is defined and nonzero.
    pub fn nonzero_witness(&mut self, e: &Expr, n: usize) -> Result<(Vec<Rational>, Rational)> {
        for _ in 0..MAX_PROBE_ATTEMPTS {
            let p = self.rational_point(n.max(e.width()));
            match e.eval_exact(&p) {
                Ok(v) if v != Rational::from_integer(0.into()) => return Ok((p, v)),
                Ok(_) | Err(Error::DivisionByZero) => continue,
                Err(other) => return Err(other),
            }
        }
        Err(Error::ProbeExhausted(MAX_PROBE_ATTEMPTS))
    }
}

pub fn is_zero_expr(e: &Expr) -> ZeroVerdict {
    if e.is_zero() {
        ZeroVerdict::Zero
    } else {
        ZeroVerdict::NonZero
    }
}

/// Zero test for a parse tree: exact for rational trees, probabilistic
/// (reported as `NumericallyZero`) when transcendental calls are present.
pub fn is_zero(ast: &Ast) -> Result<ZeroVerdict> {
    is_zero_seeded(ast, DEFAULT_SEED)
}

pub fn is_zero_seeded(ast: &Ast, seed: u64) -> Result<ZeroVerdict> {
    if ast.is_rational() {
        return Ok(is_zero_expr(&ast.to_expr()?));
    }
    let mut prober = Prober::new(seed);
    let n = ast.width();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < PROBE_POINTS {
        if attempts >= MAX_PROBE_ATTEMPTS {
            return Err(Error::ProbeExhausted(MAX_PROBE_ATTEMPTS));
        }
        attempts += 1;
        let p: Vec<f64> = prober
            .rational_point(n)
            .iter()
            .map(|r| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN))
            .collect();
        match ast.eval_f64(&p) {
            Ok(v) if v.is_finite() => {
                if v.abs() >= NUMERIC_ZERO_TOL {
                    return Ok(ZeroVerdict::NonZero);
                }
                accepted += 1;
            }
            Ok(_) | Err(Error::DivisionByZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(ZeroVerdict::NumericallyZero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse::{parse, ParseMode};

    const UV: [&str; 2] = ["u1", "u2"];

    fn verdict(s: &str) -> ZeroVerdict {
        is_zero(&parse(s, &UV, ParseMode::InitialData).unwrap()).unwrap()
    }

    #[test]
    fn exact_verdicts() {
        assert_eq!(verdict("(u1+u2)^2 - u1^2 - 2*u1*u2 - u2^2"), ZeroVerdict::Zero);
        assert_eq!(verdict("u1*u2 - u2*u1"), ZeroVerdict::Zero);
        assert_eq!(verdict("u1^2 - u2"), ZeroVerdict::NonZero);
    }

    #[test]
    fn transcendental_verdicts() {
        assert_eq!(verdict("sin(u1)^2 + cos(u1)^2 - 1"), ZeroVerdict::NumericallyZero);
        assert_eq!(verdict("exp(u1) - 1 - u1"), ZeroVerdict::NonZero);
    }

    #[test]
    fn singular_everywhere_exhausts() {
        let ast = parse("sin(u1)/(u1 - u1)", &UV, ParseMode::InitialData).unwrap();
        assert_eq!(is_zero(&ast), Err(Error::ProbeExhausted(MAX_PROBE_ATTEMPTS)));
    }

    #[test]
    fn witness_is_nonzero() {
        let e = crate::expr::parse::parse_expr("u1^2 - u2", &UV).unwrap();
        let (p, v) = Prober::new(1).nonzero_witness(&e, 2).unwrap();
        assert_eq!(e.eval_exact(&p).unwrap(), v);
    }
}
