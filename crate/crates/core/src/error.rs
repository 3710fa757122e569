use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the library.
///
/// Variants split into input problems (bad data, bad configuration) and
/// numeric failures; see [`Error::is_numeric`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("outcomes ({outcomes}) and risks ({risks}) have different lengths")]
    LengthMismatch { outcomes: usize, risks: usize },

    #[error("row {row}: predicted risk {value} is outside [0, 1]")]
    RiskOutOfRange { row: usize, value: f64 },

    #[error("threshold {value} is outside (0, {cap})")]
    ThresholdOutOfRange { value: f64, cap: f64 },

    #[error("threshold grid must be non-empty and strictly increasing")]
    UnorderedGrid,

    #[error("weight vector has length {got}, sample has {expected} rows")]
    WeightLength { expected: usize, got: usize },

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("need at least {needed} bootstrap replicates, got {got}")]
    TooFewReplicates { needed: usize, got: usize },

    #[error("sample has a single outcome class")]
    SingleClass,

    #[error("subsample size {size} exceeds dataset size {available}")]
    SubsampleTooLarge { size: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("covariance matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
