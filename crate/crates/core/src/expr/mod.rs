//! Exact symbolic kernel.
//!
//! [`Expr`] is a rational function in normal form over exact rational
//! coefficients; [`Ast`] is the parse tree, which may additionally carry
//! `sin`/`cos`/`exp` calls when parsed as initial data. Variables are plain
//! indices; names only matter at the text boundary.

mod compile;
mod gcd;
pub mod guard;
mod monomial;
mod parse;
mod poly;
mod rational;
mod zero;

pub use compile::CompiledExpr;
pub use gcd::gcd;
pub use guard::{guarded, with_term_limit, DEFAULT_TERM_LIMIT};
pub use monomial::Monomial;
pub use parse::{parse, parse_expr, parse_rational, Ast, Func, ParseMode};
pub use poly::{int, rat, Poly, Rational};
pub use rational::Expr;
pub use zero::{is_zero, is_zero_expr, is_zero_seeded, Prober, ZeroVerdict, DEFAULT_SEED};

/// `d e / d x_var`.
pub fn differentiate(e: &Expr, var: usize) -> Expr {
    e.derivative(var)
}

/// Default variable names `u1..uN`.
pub fn field_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("u{i}")).collect()
}

/// Variable names `v1..vN` used for hierarchy flows.
pub fn flow_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}
