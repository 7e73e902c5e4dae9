use thiserror::Error;

/// Errors raised by the scheduling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity domain error: argument {0} must be finite and non-negative")]
    Domain(f64),

    #[error("unsupported channel regime: h_sd / h_sr = {0} must lie in [0, 1)")]
    UnsupportedRegime(f64),

    #[error("invalid channel gains: {0}")]
    InvalidGains(String),

    #[error("invalid energy profile: {0}")]
    InvalidProfile(String),

    #[error("shape mismatch: expected {expected} blocks, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("instance must be normalized before solving")]
    NotNormalized,

    #[error("instance is already normalized")]
    AlreadyNormalized,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("oracle refuses instance with {n} blocks (limit {limit})")]
    TooManyBlocks { n: usize, limit: usize },

    #[error("profile document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
