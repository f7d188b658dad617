//! Exact finite algebra and numerical transforms for delta-method
//! decompositions of twisted sums.
//!
//! The crate has two halves. The exact half ([`arith`], [`characters`],
//! [`expsums`], [`delta`], [`factorizations`]) evaluates character sums,
//! Kloosterman/Gauss sums and the delta-symbol rearrangements both from
//! their definitions and from their factored or closed forms, so each
//! identity can be checked against an independent brute-force route. The
//! numerical half ([`oscillatory`]) evaluates the Bessel/Gamma kernels and
//! the nested oscillatory transforms with quadrature error estimates.

pub mod arith;
pub mod characters;
pub mod delta;
pub mod error;
pub mod expsums;
pub mod factorizations;
pub mod oscillatory;
pub mod quad;
pub mod weights;

pub use error::{ArithError, NumericError};
