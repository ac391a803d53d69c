use crate::{KtdError, Result};

/// Block-dimension grid: M rows (one per Kronecker factor) by N columns (one
/// per tensor mode). Entry `(m, n)` is the extent of block `m` along mode `n`;
/// down each mode the block extents must multiply to the target tensor's
/// extent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimsGrid {
    block_dims: Vec<Vec<usize>>,
}

impl DimsGrid {
    pub fn new(block_dims: Vec<Vec<usize>>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(KtdError::GridShape {
                detail: "no blocks".into(),
            });
        }
        let n = block_dims[0].len();
        if n == 0 {
            return Err(KtdError::GridShape {
                detail: "blocks have no modes".into(),
            });
        }
        for (m, row) in block_dims.iter().enumerate() {
            if row.len() != n {
                return Err(KtdError::GridShape {
                    detail: format!("block {m} has {} modes, block 0 has {n}", row.len()),
                });
            }
            if row.contains(&0) {
                return Err(KtdError::GridShape {
                    detail: format!("block {m} has a zero extent"),
                });
            }
        }
        Ok(Self { block_dims })
    }

    /// Single block covering the whole tensor.
    pub fn single_block(dims: &[usize]) -> Self {
        Self {
            block_dims: vec![dims.to_vec()],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn order(&self) -> usize {
        self.block_dims[0].len()
    }

    pub fn block(&self, m: usize) -> &[usize] {
        &self.block_dims[m]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.block_dims
    }

    /// Entries of one vectorized block.
    pub fn block_len(&self, m: usize) -> usize {
        self.block_dims[m].iter().product()
    }

    /// Columnwise products, i.e. the dims of the tensor this grid tiles.
    pub fn target_dims(&self) -> Vec<usize> {
        (0..self.order())
            .map(|n| self.block_dims.iter().map(|row| row[n]).product())
            .collect()
    }

    /// Checks the per-mode product constraint against a concrete tensor shape.
    pub fn validate_for(&self, dims: &[usize]) -> Result<()> {
        if dims.len() != self.order() {
            return Err(KtdError::GridShape {
                detail: format!(
                    "grid is for order-{} tensors, got order {}",
                    self.order(),
                    dims.len()
                ),
            });
        }
        for (n, &extent) in dims.iter().enumerate() {
            let got: usize = self.block_dims.iter().map(|row| row[n]).product();
            if got != extent {
                return Err(KtdError::GridMismatch {
                    mode: n,
                    expected: extent,
                    got,
                });
            }
        }
        Ok(())
    }
}
