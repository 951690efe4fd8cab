use thiserror::Error;

/// Errors surfaced by the exact and numeric engines.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Division that is not exact in the ring Q[pi^(1/2), pi^(-1/2)].
    #[error("inexact division in the pi-Laurent ring")]
    InexactDivision,

    /// No exact evaluation path exists for the requested parameters
    /// (odd truncation with more than one factor).
    #[error("no exact path: {0}")]
    UnsupportedExact(String),

    /// A quadrature or table construction did not reach the requested
    /// tolerance within its subdivision budget.
    #[error("accuracy not reached: requested {requested:e}, achieved {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },

    /// Eigenvalue iteration failed to converge within its budget.
    #[error("eigenvalue iteration did not converge")]
    NonConvergence,

    /// Exact determinant size guard.
    #[error("matrix dimension {n} exceeds the exact-path limit {max}")]
    TooLarge { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
