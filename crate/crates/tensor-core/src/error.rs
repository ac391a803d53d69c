use thiserror::Error;

/// Errors from tensor construction, rearrangement and `.ten` I/O.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dims {dims:?} require {expected} entries, got {got}")]
    ShapeMismatch {
        dims: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("mode {mode} out of range for order-{order} tensor")]
    InvalidMode { mode: usize, order: usize },
    #[error("{p:?} is not a permutation of 0..{order}")]
    InvalidPermutation { p: Vec<usize>, order: usize },
    #[error("cannot reshape {from} entries into dims {to:?}")]
    InvalidReshape { from: usize, to: Vec<usize> },
    #[error("dims must all be >= 1, got {dims:?}")]
    EmptyDim { dims: Vec<usize> },
    #[error("tensor orders differ ({left} vs {right}); pad explicitly first")]
    OrderMismatch { left: usize, right: usize },
    #[error("pad target order {target} below current order {order}")]
    InvalidPad { target: usize, order: usize },
    #[error("matrix shape {rows}x{cols} inconsistent with dims {dims:?} at mode {mode}")]
    FoldMismatch {
        rows: usize,
        cols: usize,
        mode: usize,
        dims: Vec<usize>,
    },
    #[error("{path}: {detail} (byte {offset})")]
    Format {
        path: String,
        detail: String,
        offset: u64,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
