//! Stride arithmetic shared by the rearrangement operations.

/// Row-major strides: last index varies fastest.
pub fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Column-major strides: first index varies fastest.
pub fn col_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in 1..dims.len() {
        strides[k] = strides[k - 1] * dims[k - 1];
    }
    strides
}

/// Decodes a row-major flat position into a multi-index.
pub fn decode_row_major(flat: usize, strides: &[usize], out: &mut [usize]) {
    let mut rem = flat;
    for (k, &s) in strides.iter().enumerate() {
        out[k] = rem / s;
        rem %= s;
    }
}

/// Dot product of a multi-index with strides.
pub fn encode(idx: &[usize], strides: &[usize]) -> usize {
    idx.iter().zip(strides).map(|(i, s)| i * s).sum()
}

/// Iterates all multi-indices of `dims` in row-major order (last index fastest).
pub struct MultiIndexIter {
    dims: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl MultiIndexIter {
    pub fn new(dims: &[usize]) -> Self {
        let done = dims.contains(&0);
        Self {
            dims: dims.to_vec(),
            current: vec![0; dims.len()],
            done,
        }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        self.done = true;
        for k in (0..self.dims.len()).rev() {
            self.current[k] += 1;
            if self.current[k] < self.dims[k] {
                self.done = false;
                break;
            }
            self.current[k] = 0;
        }
        if self.dims.is_empty() {
            self.done = true;
        }
        Some(item)
    }
}
