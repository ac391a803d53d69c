use thiserror::Error;

#[derive(Debug, Error)]
pub enum KtdError {
    #[error(transparent)]
    Tensor(#[from] tensor_core::TensorError),
    #[error(transparent)]
    Randla(#[from] randla::RandlaError),
    #[error("bad block grid: {detail}")]
    GridShape { detail: String },
    #[error("mode {mode}: block extents multiply to {got}, tensor extent is {expected}")]
    GridMismatch {
        mode: usize,
        expected: usize,
        got: usize,
    },
    #[error("tensor order {order} too low for a factorization tree")]
    OrderTooLow { order: usize },
    #[error("expected {expected} level ranks, got {got}")]
    LevelRanks { expected: usize, got: usize },
    #[error("leaf vector length {got} does not match block size {expected}")]
    LeafShape { expected: usize, got: usize },
    #[error("rank must be >= 1")]
    InvalidRank,
    #[error("sigmas must be positive and finite")]
    InvalidSigmas,
    #[error("multilinear rank for mode {mode} must be in 1..={extent}, got {got}")]
    MlRanks {
        mode: usize,
        extent: usize,
        got: usize,
    },
    #[error("model invariant violated: {detail}")]
    ModelInvariant { detail: String },
    #[error("{path}: {detail}")]
    Format { path: String, detail: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
