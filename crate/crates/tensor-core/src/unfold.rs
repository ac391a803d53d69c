use crate::index::{col_major_strides, decode_row_major, row_major_strides};
use crate::tensor::DenseTensor;
use crate::{Result, TensorError};

impl DenseTensor {
    /// Mode-`mode` unfolding: rows are the mode fibers, columns enumerate the
    /// remaining indices (in their original mode order) with the earliest
    /// remaining index varying fastest.
    pub fn unfold(&self, mode: usize) -> Result<DenseTensor> {
        let n = self.order();
        if mode >= n {
            return Err(TensorError::InvalidMode { mode, order: n });
        }
        let rows = self.dims()[mode];
        let cols = self.len() / rows;

        let rest_dims: Vec<usize> = (0..n).filter(|&k| k != mode).map(|k| self.dims()[k]).collect();
        let rest_strides = col_major_strides(&rest_dims);
        let src_strides = row_major_strides(self.dims());

        let mut out = vec![0.0; self.len()];
        let mut idx = vec![0usize; n];
        for (flat, val) in self.data().iter().enumerate() {
            decode_row_major(flat, &src_strides, &mut idx);
            let row = idx[mode];
            let mut col = 0;
            let mut r = 0;
            for k in 0..n {
                if k != mode {
                    col += idx[k] * rest_strides[r];
                    r += 1;
                }
            }
            out[row * cols + col] = *val;
        }
        DenseTensor::new(vec![rows, cols], out)
    }

    /// Inverse of [`unfold`](Self::unfold): rebuilds the tensor of shape
    /// `dims` from its mode-`mode` unfolding.
    pub fn fold(matrix: &DenseTensor, mode: usize, dims: &[usize]) -> Result<DenseTensor> {
        let n = dims.len();
        if mode >= n {
            return Err(TensorError::InvalidMode { mode, order: n });
        }
        if matrix.order() != 2 {
            return Err(TensorError::InvalidMode {
                mode: matrix.order(),
                order: 2,
            });
        }
        let rows = matrix.dims()[0];
        let cols = matrix.dims()[1];
        let total: usize = dims.iter().product();
        if rows != dims[mode] || rows * cols != total {
            return Err(TensorError::FoldMismatch {
                rows,
                cols,
                mode,
                dims: dims.to_vec(),
            });
        }

        let rest_dims: Vec<usize> = (0..n).filter(|&k| k != mode).map(|k| dims[k]).collect();
        let rest_strides = col_major_strides(&rest_dims);
        let dst_strides = row_major_strides(dims);

        let mut out = vec![0.0; total];
        let mut idx = vec![0usize; n];
        for (flat, slot) in out.iter_mut().enumerate() {
            decode_row_major(flat, &dst_strides, &mut idx);
            let row = idx[mode];
            let mut col = 0;
            let mut r = 0;
            for k in 0..n {
                if k != mode {
                    col += idx[k] * rest_strides[r];
                    r += 1;
                }
            }
            *slot = matrix.data()[row * cols + col];
        }
        DenseTensor::new(dims.to_vec(), out)
    }
}
