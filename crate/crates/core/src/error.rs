use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("feature dimension mismatch: view {view} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        view: usize,
        expected: usize,
        found: usize,
    },

    #[error("view {view}: shot metadata lists {metadata} shots but the feature matrix has {columns} columns")]
    ShotCountMismatch {
        view: usize,
        metadata: usize,
        columns: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("zero-norm descriptor (view {view}, shot {shot})")]
    ZeroNormDescriptor { view: usize, shot: usize },

    #[error("invalid shot metadata: {0}")]
    InvalidShots(String),

    #[error("invalid ground truth: {0}")]
    InvalidGroundTruth(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("sequence of {len} frames is shorter than the minimum shot length {min_len}")]
    SequenceTooShort { len: usize, min_len: usize },

    #[error("empty shot range [{start}, {end}]")]
    EmptyShot { start: usize, end: usize },

    #[error("system matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,

    #[error("graph too disconnected: {available} nonzero eigenvalues available, {requested} requested")]
    InsufficientSpectrum { requested: usize, available: usize },

    #[error("no events to score")]
    EmptyGroundTruth,
}

impl Error {
    /// True for failures of the numerical kernels, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite | Error::EigenFailure | Error::InsufficientSpectrum { .. }
        )
    }
}
