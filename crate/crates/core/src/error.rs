use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("mass matrix entry {index} is not strictly positive ({value:e})")]
    SingularMassMatrix { index: usize, value: f64 },
    #[error("too few points: need more than {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("vector must not be empty")]
    EmptyVector,
    #[error("accuracy list must not be empty")]
    EmptyList,
    #[error("regularizer mu must be positive and finite, got {0}")]
    NonPositiveMu(f64),
    #[error("heads disagree on feature dimension: {0}")]
    HeadDimMismatch(String),
    #[error("head count mismatch: expected {expected}, got {got}")]
    HeadCountMismatch { expected: usize, got: usize },
    #[error("eigensolver residual {residual:e} exceeds tolerance {tolerance:e}")]
    EigensolverFailure { residual: f64, tolerance: f64 },
    #[error("class {class} has {available} samples, episode needs {needed}")]
    InsufficientSamples {
        class: i64,
        available: usize,
        needed: usize,
    },
    #[error("dataset has {available} classes, episode needs {needed}")]
    InsufficientClasses { available: usize, needed: usize },
    #[error("pseudo-label budget {budget} exceeds unlabeled pool of {pool}")]
    BudgetExceedsPool { budget: usize, pool: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot parse manifest {path}: {reason}")]
    ManifestParse { path: PathBuf, reason: String },
    #[error("head file missing: {0}")]
    HeadFileMissing(PathBuf),
    #[error("sample count mismatch: {0}")]
    SampleCountMismatch(String),
    #[error("bad magic bytes in {0}")]
    BadMagic(PathBuf),
    #[error("unsupported feature file version {version} in {path}")]
    BadVersion { path: PathBuf, version: u32 },
    #[error("malformed data in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the requested configuration rather than by the data
    /// or the environment.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::InsufficientClasses { .. }
                | Error::InsufficientSamples { .. }
                | Error::BudgetExceedsPool { .. }
                | Error::NonPositiveMu(_)
        )
    }
}
