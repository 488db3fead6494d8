//! Exact computer algebra for quaternion algebras with involutions,
//! (skew-)hermitian forms and their similitudes, generic orthogonal sums,
//! and descent of unitary involutions — with machine-checkable certificates
//! for every decision.
//!
//! Everything is exact: arbitrary-precision rationals and Gaussian
//! rationals, sparse multivariate polynomials, and three-valued verdicts
//! (`yes` / `no` / `unknown`) where completeness is out of reach. No
//! operation ever converts `unknown` into a boolean.

pub mod fields;
pub mod quadforms;
pub mod quaternion;
pub mod hermitian;
pub mod genericsum;
pub mod descent;
pub mod cli;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input: {0}")]
    ZeroInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
