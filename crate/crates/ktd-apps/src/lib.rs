//! Applications of the Kronecker tensor decomposition: masked completion,
//! compression with quality metrics, denoising and super-resolution.

mod completion;
mod compress;
mod denoise;
mod error;
mod metrics;
pub mod noise;
mod smooth;
mod superres;

pub use completion::{
    complete, Acceleration, CompletionConfig, CompletionState, IterationStats, Smoothing,
};
pub use compress::{compress, CompressionMetrics};
pub use denoise::denoise;
pub use error::AppsError;
pub use metrics::{psnr, relative_error};
pub use smooth::smooth_box3;
pub use superres::{downsample_mask, super_resolve};

pub type Result<T> = std::result::Result<T, AppsError>;
