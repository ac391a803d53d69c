use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RandlaError {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("rank must be >= 1")]
    ZeroRank,
    #[error("oversampling must be >= 2, got {got}")]
    BadOversampling { got: usize },
    #[error("pass budget must be >= 1, got {got}")]
    BadPassBudget { got: usize },
    #[error("SVD did not converge")]
    SvdFailed,
}
