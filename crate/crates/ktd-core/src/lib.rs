//! Kronecker tensor decomposition (KTD).
//!
//! A tensor is rearranged so that each Kronecker block becomes one mode of a
//! smaller-order tensor, which is then expanded into a sum of mutually
//! orthogonal rank-1 terms by a tree of truncated SVDs. The products of the
//! per-level singular values act exactly like matrix singular values: sorting
//! and truncating them gives the rank-R model, and the discarded tail gives
//! the relative error in closed form.
//!
//! Four decomposition routes share this pipeline: deterministic SVDs,
//! randomized SVDs with power iteration, a pass-budgeted variant, and a
//! prior Tucker compression of the rearranged tensor.

mod decompose;
mod error;
mod grid;
mod layout;
mod model;
mod model_io;
pub mod synth;
mod ttr1;
mod tucker;

pub use decompose::{ktd_decompose, tree_to_model};
pub use error::KtdError;
pub use grid::DimsGrid;
pub use layout::{ktd_permute_reshape, ktd_permute_reshape_inverse};
pub use model::{sigma_tail_error, DecomposeMethod, KtdModel, ModelMeta, PhaseTimings, SketchMeta};
pub use model_io::{load_model, model_from_bytes, model_to_bytes, save_model};
pub use ttr1::{r_ttr1svd, ttr1svd, Ttr1Leaf, Ttr1Tree};
pub use tucker::{mode_multiply, pt_ktd, tucker_compress, tucker_reconstruct};

pub use randla::{Matrix, SketchConfig};
pub use tensor_core::DenseTensor;

pub type Result<T> = std::result::Result<T, KtdError>;

pub(crate) fn to_matrix(t: &DenseTensor) -> Matrix {
    debug_assert_eq!(t.order(), 2);
    Matrix::from_row_slice(t.dims()[0], t.dims()[1], t.data())
}

pub(crate) fn from_matrix(m: &Matrix) -> DenseTensor {
    let (rows, cols) = m.shape();
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            data.push(m[(r, c)]);
        }
    }
    DenseTensor::new(vec![rows, cols], data).expect("matrix dims are consistent")
}
