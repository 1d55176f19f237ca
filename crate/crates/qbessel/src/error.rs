use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("series diverges: {0}")]
    DivergenceError(String),
    #[error("pole: {0}")]
    PoleError(String),
    #[error("term budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("branch error: {0}")]
    BranchError(String),
    #[error("negative radicand: {0}")]
    NegativeRadicand(String),
}

pub type Result<T> = std::result::Result<T, QError>;

pub(crate) fn domain(msg: impl Into<String>) -> QError {
    QError::DomainError(msg.into())
}
