//! Numerical laboratory for power-weighted Hardy-Rellich and Rellich
//! inequalities on balls and their iterated-logarithm refinements.
//!
//! The crate computes the sharp constants `A_{n,gamma}` and `C_{n,gamma}`,
//! reduces `n`-dimensional weighted integrals to radial ones through the
//! spherical-harmonic decomposition, checks every inequality and the
//! underlying factorization identity on concrete test functions, and
//! drives Rayleigh quotients down towards `A_{n,gamma}`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod engine;
pub mod error;
pub mod log_weights;
pub mod output;
pub mod params;
pub mod probe;
pub mod profile;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
