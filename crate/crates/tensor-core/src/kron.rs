use crate::index::{decode_row_major, row_major_strides};
use crate::tensor::DenseTensor;
use crate::{Result, TensorError};

/// Classical Kronecker product of flat vectors: `out[a*b.len() + c] = a_vec[a] * b_vec[c]`.
pub fn kron_classical(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// The interleaving that merges the two index groups of a Kronecker product:
/// `[0, n, 1, n+1, ..., n-1, 2n-1]` (0-based).
pub fn kron_merge_permutation(n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(TensorError::InvalidMode { mode: 0, order: 0 });
    }
    let mut p = Vec::with_capacity(2 * n);
    for k in 0..n {
        p.push(k);
        p.push(n + k);
    }
    Ok(p)
}

impl DenseTensor {
    /// Outer product: order `N + M`, entry-wise `z[i.., j..] = x[i..] * y[j..]`.
    pub fn outer_product(&self, other: &DenseTensor) -> DenseTensor {
        let mut dims = self.dims().to_vec();
        dims.extend_from_slice(other.dims());
        let mut data = Vec::with_capacity(self.len() * other.len());
        for &x in self.data() {
            for &y in other.data() {
                data.push(x * y);
            }
        }
        DenseTensor::new(dims, data).expect("outer product dims consistent")
    }

    /// Kronecker tensor product by the merged-index formula
    /// `z[i] = x[j] * y[k]` with `i_n = k_n + j_n * K_n` (0-based).
    ///
    /// Requires equal order; use [`pad_to_order`](Self::pad_to_order) to align
    /// first. Definition-wise the merge weight is the per-mode extent `K_n` of
    /// the second factor (the literature occasionally prints `K_N`; the
    /// element-wise merged form `[i_n i_{N+n}] = i_n + (i_{N+n}-1)K_n` fixes it
    /// per mode).
    pub fn kron(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.order() != other.order() {
            return Err(TensorError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let n = self.order();
        let dims: Vec<usize> = self
            .dims()
            .iter()
            .zip(other.dims())
            .map(|(&j, &k)| j * k)
            .collect();
        let strides = row_major_strides(&dims);
        let x_strides = row_major_strides(self.dims());
        let y_strides = row_major_strides(other.dims());

        let len: usize = dims.iter().product();
        let mut data = vec![0.0; len];
        let mut idx = vec![0usize; n];
        for (flat, slot) in data.iter_mut().enumerate() {
            decode_row_major(flat, &strides, &mut idx);
            let mut xpos = 0;
            let mut ypos = 0;
            for m in 0..n {
                let k_m = other.dims()[m];
                xpos += (idx[m] / k_m) * x_strides[m];
                ypos += (idx[m] % k_m) * y_strides[m];
            }
            *slot = self.data()[xpos] * other.data()[ypos];
        }
        DenseTensor::new(dims, data)
    }

    /// Reference route for [`kron`](Self::kron): vectorize both factors, take
    /// the classical Kronecker product, fold to order `2N`, permute with
    /// [`kron_merge_permutation`] and fold the merged index pairs. Kept as the
    /// cross-check oracle for the direct formula.
    pub fn kron_via_rearrange(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.order() != other.order() {
            return Err(TensorError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let n = self.order();
        let c = kron_classical(&self.vectorize(), &other.vectorize());
        let mut split_dims = other.dims().to_vec();
        split_dims.extend_from_slice(self.dims());
        let t = DenseTensor::from_vec(split_dims, c)?;
        let p = kron_merge_permutation(n)?;
        let interleaved = t.permute_dims(&p)?;
        let merged: Vec<usize> = self
            .dims()
            .iter()
            .zip(other.dims())
            .map(|(&j, &k)| j * k)
            .collect();
        DenseTensor::from_vec(merged, interleaved.vectorize())
    }
}
