use thiserror::Error;

pub type Result<T> = std::result::Result<T, AganError>;

#[derive(Debug, Error)]
pub enum AganError {
    #[error("invalid Rényi order {0}: must be a non-negative number")]
    InvalidAlpha(f64),

    #[error("order α = {alpha} is not supported by {op}")]
    UnsupportedOrder { op: &'static str, alpha: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input")]
    EmptyInput,

    #[error("stale forward cache: {0}")]
    StaleCache(String),

    #[error("training diverged at epoch {epoch} (α = {alpha}): {detail}")]
    Divergence {
        epoch: usize,
        alpha: f64,
        detail: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
