//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix has no positive spectral weight to normalize")]
    ZeroSpectralWeight,

    #[error("theta = {theta} lies inside a degenerate-family exclusion window")]
    DegenerateTheta { theta: f64 },

    #[error("invalid state parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown polarization label `{0}`")]
    UnknownLabel(String),

    #[error("insufficient counts: {0}")]
    InsufficientCounts(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("optimizer failed to converge (residual {residual:.3e})")]
    OptimizerFailure { residual: f64 },

    #[error("training failed: {0}")]
    Training(String),

    #[error("dataset is empty or malformed: {0}")]
    BadDataset(String),

    #[error("unsupported model file: {0}")]
    ModelFormat(String),

    #[error("dimension guard exceeded: {0}")]
    DimensionGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
