//! Dense N-way tensors and the exact multilinear algebra the KTD is built on:
//! unfolding, vectorization, permutation, outer and Kronecker tensor products.
//!
//! # Index conventions
//!
//! Two linearizations coexist and are fixed library-wide:
//!
//! * **Storage order** (the `data` buffer, [`DenseTensor::reshape`] and the
//!   `.ten` file payload) is row-major: the *last* index varies fastest.
//! * **Vectorization order** ([`DenseTensor::vectorize`],
//!   [`DenseTensor::from_vec`] and the column order of
//!   [`DenseTensor::unfold`]) stacks with the *first* index varying fastest,
//!   so that `vec(x) == vec(unfold(x, 0))` and the outer/Kronecker identities
//!   (`vec(a ∘ b ∘ c) == c ⊗ b ⊗ a`) hold entry for entry.
//!
//! All modes and permutation vectors are 0-based.

mod error;
pub mod index;
pub mod io;
mod kron;
mod tensor;
mod unfold;

pub use error::TensorError;
pub use kron::{kron_classical, kron_merge_permutation};
pub use tensor::DenseTensor;

pub type Result<T> = std::result::Result<T, TensorError>;
