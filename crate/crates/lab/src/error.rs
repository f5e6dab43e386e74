//! Harness-level errors and the machine-readable form they take on stderr.

use std::fmt;

use qcorr::Error as CoreError;

/// Errors a command can raise on top of the library's own.
#[derive(Debug)]
pub enum LabError {
    Core(CoreError),
    /// A required input file is missing; the message says which command
    /// produces it.
    MissingArtifact(String),
    /// The measured timing ordering contradicts the expected one.
    OrderingViolated(String),
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Core(e) => write!(f, "{e}"),
            LabError::MissingArtifact(msg) => write!(f, "missing artifact: {msg}"),
            LabError::OrderingViolated(msg) => write!(f, "timing ordering violated: {msg}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        LabError::Core(e)
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Core(CoreError::Io(e))
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Core(CoreError::Json(e))
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;

fn core_error_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::DimensionMismatch(_) => "dimension-mismatch",
        CoreError::NotHermitian { .. } => "not-hermitian",
        CoreError::InvalidDensityMatrix(_) => "invalid-density-matrix",
        CoreError::ZeroSpectralWeight => "zero-spectral-weight",
        CoreError::DegenerateTheta { .. } => "degenerate-theta",
        CoreError::InvalidParameter(_) => "invalid-parameter",
        CoreError::UnknownLabel(_) => "unknown-label",
        CoreError::InsufficientCounts(_) => "insufficient-counts",
        CoreError::SingularSystem(_) => "singular-system",
        CoreError::OptimizerFailure { .. } => "optimizer-failure",
        CoreError::Training(_) => "training",
        CoreError::BadDataset(_) => "bad-dataset",
        CoreError::ModelFormat(_) => "model-format",
        CoreError::DimensionGuard(_) => "dimension-guard",
        CoreError::Io(_) => "io",
        CoreError::Json(_) => "json",
    }
}

impl LabError {
    /// Stable error-kind slug for the JSON error object.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Core(e) => core_error_kind(e),
            LabError::MissingArtifact(_) => "missing-artifact",
            LabError::OrderingViolated(_) => "ordering-violated",
        }
    }
}

/// Prints the machine-readable error object this tool guarantees on stderr.
pub fn emit_error_json(kind: &str, message: &str) {
    let obj = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{obj}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_are_stable_slugs() {
        let e = LabError::MissingArtifact("train.jsonl (run gen-data first)".into());
        assert_eq!(e.kind(), "missing-artifact");
        let e = LabError::from(CoreError::DimensionGuard("too big".into()));
        assert_eq!(e.kind(), "dimension-guard");
    }
}
