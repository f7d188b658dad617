//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by residue arithmetic, character construction and the
/// exact-sum evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArithError {
    /// `mod_inverse(a, q)` with `gcd(a, q) > 1`.
    #[error("{a} is not invertible modulo {q} (gcd = {g})")]
    NonInvertible { a: i64, q: u64, g: u64 },
    /// A modulus that was required to be prime is not.
    #[error("{0} is not prime")]
    NotPrime(u64),
    /// Two moduli that were required to be coprime share a factor.
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),
    /// A character that was required to be primitive is not.
    #[error("character mod {0} is not primitive")]
    NotPrimitive(u64),
    /// A residue that was required to be a unit is divisible by the modulus.
    #[error("{name} = {value} is not a unit modulo {modulus}")]
    NonUnit {
        name: &'static str,
        value: i64,
        modulus: u64,
    },
    /// A structural precondition on a parameter tuple failed.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    /// A divisibility precondition (e.g. `n1 | q r`) failed.
    #[error("divisibility violation: {0}")]
    DivisibilityViolation(String),
}

/// Errors raised by the quadrature-backed transforms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failure: {context} (error estimate {estimate:.3e} > tolerance {tolerance:.3e})")]
    QuadratureFailure {
        context: &'static str,
        estimate: f64,
        tolerance: f64,
    },
    /// A truncated tail is estimated to exceed the requested tolerance.
    #[error("truncation budget exceeded: {context} (tail estimate {estimate:.3e} > tolerance {tolerance:.3e})")]
    TruncationBudgetExceeded {
        context: &'static str,
        estimate: f64,
        tolerance: f64,
    },
    /// Evaluation requested within `1e-6` of a Gamma-factor pole.
    #[error("evaluation point within {distance:.3e} of a pole of the Gamma factors")]
    PoleProximity { distance: f64 },
    /// Argument outside the domain of the operation (e.g. `q > Q`).
    #[error("out of range: {0}")]
    OutOfRange(String),
}
