use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppsError {
    #[error(transparent)]
    Tensor(#[from] tensor_core::TensorError),
    #[error(transparent)]
    Ktd(#[from] ktd_core::KtdError),
    #[error("mask and data dims differ: {mask:?} vs {data:?}")]
    MaskShape { mask: Vec<usize>, data: Vec<usize> },
    #[error("mask entries must be exactly 0 or 1")]
    NonBinaryMask,
    #[error("mask observes no entries")]
    EmptyMask,
    #[error("dims differ: {left:?} vs {right:?}")]
    DimMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("peak must be > 0, got {got}")]
    BadPeak { got: f64 },
    #[error("mode {mode} out of range for order-{order} tensor")]
    BadMode { mode: usize, order: usize },
    #[error("downsample stride must be >= 1")]
    BadStride,
}
