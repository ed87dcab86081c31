//! Nonlocal Poisson brackets of hydrodynamic type.
//!
//! Exact checks of the Poisson and compatibility conditions for brackets
//!
//! ```text
//! {I, J} = ∫ δI/δu^i ( g^{ij}(u) d/dx + b^{ij}_k(u) u^k_x + K u^i_x (d/dx)^{-1} u^j_x ) δJ/δu^j dx,
//! ```
//!
//! construction of the canonical compatible pair generated by potentials
//! `H^i(u)`, the bi-Hamiltonian hierarchy of hydrodynamic-type flows it
//! produces, and a periodic pseudo-spectral integrator for those flows.
//!
//! Runnable examples live in `examples/`; `cargo run --example <name>`.

pub mod bracket;
pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hierarchy;
pub mod numsim;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{Expr, Rational};
