//! The rearrangement that turns Kronecker block structure into plain
//! low-rank structure.
//!
//! Each index `i_n` of the tensor splits into one sub-index per block,
//! mixed-radix with the last block fastest (the same merge rule as the
//! Kronecker tensor product). Collecting, for every block `m`, its sub-index
//! vector and linearizing it first-index-fastest yields the vectorized-block
//! index `v_m`; the rearranged tensor has one mode per block, ordered
//! `(v_{M-1}, ..., v_0)`. A sum of R Kronecker terms becomes a sum of R outer
//! products of the vectorized blocks, so CPD machinery applies directly.

use tensor_core::index::{decode_row_major, row_major_strides};
use tensor_core::DenseTensor;

use crate::{DimsGrid, KtdError, Result};

struct LayoutMap {
    x_strides: Vec<usize>,
    y_strides: Vec<usize>,
    y_dims: Vec<usize>,
    // per mode n: extents J^(m)_n for m = 0..M
    radices: Vec<Vec<usize>>,
    // per block m: first-fastest strides over its modes
    block_strides: Vec<Vec<usize>>,
    order: usize,
    blocks: usize,
}

impl LayoutMap {
    fn new(dims: &[usize], grid: &DimsGrid) -> Self {
        let n = dims.len();
        let m = grid.num_blocks();
        let radices: Vec<Vec<usize>> = (0..n)
            .map(|mode| (0..m).map(|b| grid.block(b)[mode]).collect())
            .collect();
        let block_strides: Vec<Vec<usize>> = (0..m)
            .map(|b| {
                let mut s = vec![1usize; n];
                for mode in 1..n {
                    s[mode] = s[mode - 1] * grid.block(b)[mode - 1];
                }
                s
            })
            .collect();
        let y_dims: Vec<usize> = (0..m).map(|k| grid.block_len(m - 1 - k)).collect();
        LayoutMap {
            x_strides: row_major_strides(dims),
            y_strides: row_major_strides(&y_dims),
            y_dims,
            radices,
            block_strides,
            order: n,
            blocks: m,
        }
    }

    /// Flat position in the rearranged tensor for a multi-index of the source.
    fn y_position(&self, idx: &[usize]) -> usize {
        let mut v = vec![0usize; self.blocks];
        for mode in 0..self.order {
            let mut rem = idx[mode];
            for b in (0..self.blocks).rev() {
                let radix = self.radices[mode][b];
                v[b] += (rem % radix) * self.block_strides[b][mode];
                rem /= radix;
            }
        }
        (0..self.blocks)
            .map(|k| v[self.blocks - 1 - k] * self.y_strides[k])
            .sum()
    }
}

/// Rearranges `x` into the order-M tensor whose mode `k` runs over the
/// vectorized entries of block `M-1-k`. A pure relocation of entries; the
/// Frobenius norm is preserved exactly and
/// [`ktd_permute_reshape_inverse`] restores `x` bitwise.
pub fn ktd_permute_reshape(x: &DenseTensor, grid: &DimsGrid) -> Result<DenseTensor> {
    grid.validate_for(x.dims())?;
    let map = LayoutMap::new(x.dims(), grid);
    let mut out = vec![0.0; x.len()];
    let mut idx = vec![0usize; x.order()];
    for (flat, val) in x.data().iter().enumerate() {
        decode_row_major(flat, &map.x_strides, &mut idx);
        out[map.y_position(&idx)] = *val;
    }
    Ok(DenseTensor::new(map.y_dims, out).expect("layout preserves entry count"))
}

/// Exact inverse of [`ktd_permute_reshape`] for the same grid and original
/// dims.
pub fn ktd_permute_reshape_inverse(
    y: &DenseTensor,
    grid: &DimsGrid,
    dims: &[usize],
) -> Result<DenseTensor> {
    grid.validate_for(dims)?;
    let map = LayoutMap::new(dims, grid);
    if y.dims() != map.y_dims.as_slice() {
        return Err(KtdError::GridShape {
            detail: format!(
                "rearranged dims {:?} do not match grid blocks {:?}",
                y.dims(),
                map.y_dims
            ),
        });
    }
    let total: usize = dims.iter().product();
    let mut out = vec![0.0; total];
    let mut idx = vec![0usize; dims.len()];
    for (flat, slot) in out.iter_mut().enumerate() {
        decode_row_major(flat, &map.x_strides, &mut idx);
        *slot = y.data()[map.y_position(&idx)];
    }
    Ok(DenseTensor::new(dims.to_vec(), out).expect("layout preserves entry count"))
}
