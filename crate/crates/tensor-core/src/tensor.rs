use crate::index::{col_major_strides, encode, row_major_strides, MultiIndexIter};
use crate::{Result, TensorError};

/// Dense N-way tensor of `f64` with an explicit dimension vector.
///
/// The `data` buffer is row-major (last index varies fastest); see the crate
/// docs for the two linearization conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from dims and a row-major buffer.
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(TensorError::EmptyDim { dims });
        }
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(TensorError::ShapeMismatch {
                dims,
                expected,
                got: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len: usize = dims.iter().product();
        Self::new(dims, vec![0.0; len])
    }

    /// Fills from a function of the multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let dims = t.dims.clone();
        for (pos, idx) in MultiIndexIter::new(&dims).enumerate() {
            t.data[pos] = f(&idx);
        }
        Ok(t)
    }

    /// Order-1 tensor wrapping a vector.
    pub fn from_vec1(data: Vec<f64>) -> Result<Self> {
        let n = data.len();
        Self::new(vec![n], data)
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            dims: vec![1],
            data: vec![value],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.order());
        self.data[encode(idx, &row_major_strides(&self.dims))]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let pos = encode(idx, &row_major_strides(&self.dims));
        self.data[pos] = value;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Elementwise map into a new tensor.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Elementwise combination; dims must match.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(TensorError::ShapeMismatch {
                dims: other.dims.clone(),
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Self {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Reinterprets the row-major buffer under new dims; the buffer is untouched.
    pub fn reshape(&self, new_dims: Vec<usize>) -> Result<Self> {
        if new_dims.is_empty() || new_dims.contains(&0) {
            return Err(TensorError::EmptyDim { dims: new_dims });
        }
        if new_dims.iter().product::<usize>() != self.len() {
            return Err(TensorError::InvalidReshape {
                from: self.len(),
                to: new_dims,
            });
        }
        Ok(Self {
            dims: new_dims,
            data: self.data.clone(),
        })
    }

    /// Relocates entries so that `result.dims[k] == self.dims[p[k]]` and
    /// `result[u] == self[v]` with `v[p[k]] = u[k]`. Applying the inverse
    /// permutation restores the tensor bitwise.
    pub fn permute_dims(&self, p: &[usize]) -> Result<Self> {
        let n = self.order();
        let mut seen = vec![false; n];
        if p.len() != n || !p.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true)) {
            return Err(TensorError::InvalidPermutation {
                p: p.to_vec(),
                order: n,
            });
        }
        let new_dims: Vec<usize> = p.iter().map(|&k| self.dims[k]).collect();
        let src_strides = row_major_strides(&self.dims);
        let dst_strides = row_major_strides(&new_dims);
        let mut out = vec![0.0; self.len()];
        let mut idx = vec![0usize; n];
        for (flat, val) in self.data.iter().enumerate() {
            crate::index::decode_row_major(flat, &src_strides, &mut idx);
            // u[k] = v[p[k]] maps source index v to destination index u
            let dst: usize = (0..n).map(|k| idx[p[k]] * dst_strides[k]).sum();
            out[dst] = *val;
        }
        Ok(Self {
            dims: new_dims,
            data: out,
        })
    }

    pub fn inverse_permutation(p: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; p.len()];
        for (k, &pk) in p.iter().enumerate() {
            inv[pk] = k;
        }
        inv
    }

    /// Vectorizes with the first index fastest, i.e. column-stacking of the
    /// mode-0 unfolding; equals `vec(unfold(self, 0))`.
    pub fn vectorize(&self) -> Vec<f64> {
        let cstrides = col_major_strides(&self.dims);
        let rstrides = row_major_strides(&self.dims);
        let mut out = vec![0.0; self.len()];
        let mut idx = vec![0usize; self.order()];
        for (flat, val) in self.data.iter().enumerate() {
            crate::index::decode_row_major(flat, &rstrides, &mut idx);
            out[encode(&idx, &cstrides)] = *val;
        }
        out
    }

    /// Inverse of [`vectorize`](Self::vectorize): interprets `vec` with the
    /// first index fastest and builds the tensor.
    pub fn from_vec(dims: Vec<usize>, vec: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(TensorError::EmptyDim { dims });
        }
        let expected: usize = dims.iter().product();
        if expected != vec.len() {
            return Err(TensorError::ShapeMismatch {
                dims,
                expected,
                got: vec.len(),
            });
        }
        let cstrides = col_major_strides(&dims);
        let rstrides = row_major_strides(&dims);
        let mut data = vec![0.0; vec.len()];
        let mut idx = vec![0usize; dims.len()];
        for (flat, slot) in data.iter_mut().enumerate() {
            crate::index::decode_row_major(flat, &rstrides, &mut idx);
            *slot = vec[encode(&idx, &cstrides)];
        }
        Ok(Self { dims, data })
    }

    /// Appends extents of 1 until the tensor has the target order.
    pub fn pad_to_order(&self, target: usize) -> Result<Self> {
        if target < self.order() {
            return Err(TensorError::InvalidPad {
                target,
                order: self.order(),
            });
        }
        let mut dims = self.dims.clone();
        dims.resize(target, 1);
        Ok(Self {
            dims,
            data: self.data.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_shape_mismatch() {
        assert!(DenseTensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(DenseTensor::new(vec![2, 0], vec![]).is_err());
    }

    #[test]
    fn vectorize_column_stacks() {
        // [[1,2],[3,4]] row-major -> column stacking [1,3,2,4]
        let t = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.vectorize(), vec![1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn vectorize_scalar_and_norm() {
        let t = DenseTensor::scalar(7.5);
        assert_eq!(t.vectorize(), vec![7.5]);
        let t = DenseTensor::from_fn(vec![3, 4, 5], |i| (i[0] * 7 + i[1] * 3 + i[2]) as f64)
            .unwrap();
        let v = t.vectorize();
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_eq!(vnorm, t.frobenius_norm());
    }

    #[test]
    fn from_vec_inverts_vectorize() {
        let t = DenseTensor::from_fn(vec![2, 3, 4], |i| (i[0] + 10 * i[1] + 100 * i[2]) as f64)
            .unwrap();
        let back = DenseTensor::from_vec(vec![2, 3, 4], t.vectorize()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn reshape_keeps_buffer() {
        let t = DenseTensor::new(vec![2, 3], (1..=6).map(f64::from).collect()).unwrap();
        let r = t.reshape(vec![3, 2]).unwrap();
        assert_eq!(r.data(), t.data());
        let rr = r.reshape(vec![6]).unwrap().reshape(vec![1, 6]).unwrap();
        assert_eq!(rr.data(), t.data());
        assert!(t.reshape(vec![4, 2]).is_err());
    }

    #[test]
    fn permute_identity_and_transpose() {
        let t = DenseTensor::new(vec![2, 3], (1..=6).map(f64::from).collect()).unwrap();
        assert_eq!(t.permute_dims(&[0, 1]).unwrap(), t);
        let tt = t.permute_dims(&[1, 0]).unwrap();
        assert_eq!(tt.dims(), &[3, 2]);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(tt.get(&[j, i]), t.get(&[i, j]));
            }
        }
    }

    #[test]
    fn permute_round_trip() {
        let t = DenseTensor::from_fn(vec![2, 3, 4], |i| (i[0] + 2 * i[1] + 7 * i[2]) as f64)
            .unwrap();
        let p = [2, 0, 1];
        let inv = DenseTensor::inverse_permutation(&p);
        let back = t.permute_dims(&p).unwrap().permute_dims(&inv).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn permute_rejects_non_permutation() {
        let t = DenseTensor::zeros(vec![2, 2]).unwrap();
        assert!(t.permute_dims(&[0, 0]).is_err());
        assert!(t.permute_dims(&[0]).is_err());
        assert!(t.permute_dims(&[0, 2]).is_err());
    }

    #[test]
    fn pad_appends_unit_extents() {
        let t = DenseTensor::from_vec1(vec![1.0, 2.0]).unwrap();
        let p = t.pad_to_order(3).unwrap();
        assert_eq!(p.dims(), &[2, 1, 1]);
        assert_eq!(p.data(), t.data());
        assert!(t.pad_to_order(0).is_err());
    }
}
