use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elector count must be at least 1, got {0}")]
    NonPositiveElectors(i64),

    #[error("probability distribution has no outcomes")]
    EmptyDistribution,

    #[error("probability p_{index} = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, which differs from 1 by more than {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("expected {expected} party counts, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tally totals {found} electors but the system has {expected}")]
    TallyTotalMismatch { expected: u64, found: u64 },

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("enumeration of {required} configurations exceeds the cap of {cap}")]
    EnumerationTooLarge { required: BigUint, cap: u64 },

    #[error("party index {index} is outside 1..={parties}")]
    IndexOutOfRange { index: usize, parties: usize },

    #[error("count {count} is outside 0..={electors}")]
    CountOutOfRange { count: u64, electors: u64 },

    #[error("distribution is degenerate (sum of squared probabilities is 1); the flexibility gradient is singular")]
    DegenerateDistribution,

    #[error("at least {min} trials are required, got {trials}")]
    TooFewTrials { trials: u64, min: u64 },
}

impl Error {
    /// Stable identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveElectors(_) => "NonPositiveElectors",
            Error::EmptyDistribution => "EmptyDistribution",
            Error::ProbabilityOutOfRange { .. } => "ProbabilityOutOfRange",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TallyTotalMismatch { .. } => "TallyTotalMismatch",
            Error::InvalidArguments(_) => "InvalidArguments",
            Error::EnumerationTooLarge { .. } => "EnumerationTooLarge",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CountOutOfRange { .. } => "CountOutOfRange",
            Error::DegenerateDistribution => "DegenerateDistribution",
            Error::TooFewTrials { .. } => "TooFewTrials",
        }
    }
}
