//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the oracles, solvers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed arguments: wrong dimensions, non-finite entries, empty sets.
    #[error("invalid input: {0}")]
    Input(String),

    /// An inner iterative routine hit its iteration cap.
    #[error("{what} did not converge within {iterations} iterations (last residual {residual:e})")]
    Convergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// Degenerate geometry, e.g. distinct collinear points without a circumcenter.
    #[error("degenerate geometry: {0}")]
    Geometry(String),

    /// The requested operation is not available for this object.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The boundary is not a smooth manifold at the requested point.
    #[error("boundary is not regular here: {0}")]
    Regularity(String),

    /// A sampling estimator had no admissible samples.
    #[error("estimation failed: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
