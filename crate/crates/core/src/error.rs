use thiserror::Error;

/// Errors produced by configuration, simulation and verification code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("second moment required: {0}")]
    SecondMomentRequired(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("malformed step record at index {index}: {reason}")]
    MalformedRecord { index: u64, reason: String },

    #[error("trace format error: {0}")]
    Trace(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
