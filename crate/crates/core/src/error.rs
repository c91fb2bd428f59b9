use thiserror::Error;

/// Errors raised by toolkit operations.
///
/// Well-formed negative results (a filter failing the QMF test, a family that
/// is not orthonormal) are reported through [`crate::Verdict`] values, never
/// through this type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Operands that cannot be combined: mismatched cycle systems, grids that
    /// have no common refinement, wrong filter kind.
    #[error("structural error: {0}")]
    Structural(String),

    /// An exact integer quantity would not fit the fixed integer width.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Invalid user input (bad cycles, overlapping arcs, gcd(p, N) != 1, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A documented precondition of the operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested configuration is deliberately unsupported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Floating point evaluation could not be decided (point on an arc boundary).
    #[error("precision error: {0}")]
    Precision(String),

    /// Numerical failure: eigensolver non-convergence, divergent iteration,
    /// broken internal identity.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
