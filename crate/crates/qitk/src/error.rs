use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid targets: {0}")]
    Targets(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("retry budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sanity check failed: {0}")]
    Sanity(String),
}

pub type Result<T> = std::result::Result<T, QError>;
