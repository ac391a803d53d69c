use crate::{Matrix, RandlaError, Result};

/// Rank-k singular triplet with column-orthonormal factors and nonincreasing
/// singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// Left singular vectors, one column per retained value.
    pub left: Matrix,
    /// Nonincreasing, nonnegative.
    pub singulars: Vec<f64>,
    /// Right singular vectors, one column per retained value.
    pub right: Matrix,
    /// Set when the requested width exceeded the matrix and was clamped.
    pub clamped: bool,
    /// Full reads of the data matrix spent computing this factorization.
    pub passes: usize,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.singulars.len()
    }

    /// U Σ Vᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let sigma = Matrix::from_diagonal(&nalgebra::DVector::from_vec(self.singulars.clone()));
        &self.left * sigma * self.right.transpose()
    }

    /// Keeps the leading `rank` triplets.
    pub fn truncate(mut self, rank: usize) -> Self {
        let k = rank.min(self.rank());
        self.left = self.left.columns(0, k).into_owned();
        self.right = self.right.columns(0, k).into_owned();
        self.singulars.truncate(k);
        self
    }
}

/// Flips each singular pair so the largest-magnitude entry of the left vector
/// is positive; ties break to the lowest index. Keeps model files reproducible.
pub(crate) fn apply_sign_convention(left: &mut Matrix, right: &mut Matrix) {
    for c in 0..left.ncols() {
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for r in 0..left.nrows() {
            let a = left[(r, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if left[(best, c)] < 0.0 {
            for r in 0..left.nrows() {
                left[(r, c)] = -left[(r, c)];
            }
            for r in 0..right.nrows() {
                right[(r, c)] = -right[(r, c)];
            }
        }
    }
}

/// Full dense SVD sorted nonincreasing, with the sign convention applied.
pub(crate) fn dense_svd(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (mut left, singulars, mut right) = crate::jacobi::jacobi_svd(m)?;
    apply_sign_convention(&mut left, &mut right);
    Ok((left, singulars, right))
}

/// Top-`min(rank, min(dims))` triplet of an exact dense SVD.
pub fn truncated_svd(m: &Matrix, rank: usize) -> Result<TruncatedSvd> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(RandlaError::EmptyMatrix);
    }
    if rank == 0 {
        return Err(RandlaError::ZeroRank);
    }
    let (left, singulars, right) = dense_svd(m)?;
    let k = rank.min(singulars.len());
    Ok(TruncatedSvd {
        left: left.columns(0, k).into_owned(),
        singulars: singulars[..k].to_vec(),
        right: right.columns(0, k).into_owned(),
        clamped: rank > k,
        passes: 1,
    })
}
