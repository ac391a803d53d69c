//! Truncated and randomized low-rank matrix factorizations.
//!
//! The deterministic backend is a dense SVD truncated to the target rank.
//! The randomized paths sketch with a seeded Gaussian matrix, stabilize power
//! iterations by re-orthonormalizing after every application of the data
//! matrix, and support an explicit pass budget including a one-pass
//! co-sketch. Randomness comes from ChaCha8 seeded per call; identical seeds
//! give identical output within one build of this crate.

mod config;
mod error;
mod jacobi;
mod pass;
pub mod rng;
mod sketch;
mod svd;

pub use config::SketchConfig;
pub use error::RandlaError;
pub use pass::{pass_efficient_range, pass_efficient_svd};
pub use sketch::{gaussian_sketch, randomized_range, rsvd, RangeBasis};
pub use svd::{truncated_svd, TruncatedSvd};

pub type Result<T> = std::result::Result<T, RandlaError>;
pub type Matrix = nalgebra::DMatrix<f64>;
