use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::rng_from_seed;
use crate::svd::{apply_sign_convention, dense_svd, TruncatedSvd};
use crate::{Matrix, RandlaError, Result, SketchConfig};

/// Column-orthonormal basis for the approximate range of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeBasis {
    pub basis: Matrix,
    /// Full reads of the data matrix.
    pub passes: usize,
    pub clamped: bool,
}

/// `data_cols x count` matrix of i.i.d. standard normals from a seeded
/// ChaCha8 stream, filled column by column. Identical seeds give identical
/// matrices within one build.
pub fn gaussian_sketch(data_cols: usize, count: usize, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    let mut m = Matrix::zeros(data_cols, count);
    for c in 0..count {
        for r in 0..data_cols {
            m[(r, c)] = rng.sample(StandardNormal);
        }
    }
    m
}

pub(crate) fn thin_q(m: &Matrix) -> Matrix {
    m.clone().qr().q()
}

/// Range finder: QR of the power-iterated Gaussian sketch, re-orthonormalizing
/// after every multiplication with the data matrix. Costs `2q + 1` passes.
pub fn randomized_range(m: &Matrix, cfg: &SketchConfig) -> Result<RangeBasis> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(RandlaError::EmptyMatrix);
    }
    cfg.validate()?;
    let (width, clamped) = cfg.sketch_width(m.nrows(), m.ncols());
    let omega = gaussian_sketch(m.ncols(), width, cfg.seed);

    let mut passes = 0usize;
    let mut q = thin_q(&{
        passes += 1;
        m * &omega
    });
    for _ in 0..cfg.power_q {
        let z = thin_q(&{
            passes += 1;
            m.transpose() * &q
        });
        q = thin_q(&{
            passes += 1;
            m * &z
        });
    }
    Ok(RangeBasis {
        basis: q,
        passes,
        clamped,
    })
}

/// Randomized truncated SVD: project onto the sketched range, factor the
/// small matrix, map back, truncate to the target rank. When
/// `cfg.pass_budget` is set the pass-efficient schedule is used instead.
pub fn rsvd(m: &Matrix, cfg: &SketchConfig) -> Result<TruncatedSvd> {
    if cfg.pass_budget.is_some() {
        return crate::pass::pass_efficient_svd(m, cfg);
    }
    let range = randomized_range(m, cfg)?;
    let q = range.basis;
    let small = q.transpose() * m; // one more pass over the data
    let passes = range.passes + 1;
    let (u_small, singulars, right) = dense_svd(&small)?;
    let mut left = &q * u_small;
    let mut right = right;
    apply_sign_convention(&mut left, &mut right);
    Ok(TruncatedSvd {
        left,
        singulars,
        right,
        clamped: range.clamped,
        passes,
    }
    .truncate(cfg.rank))
}
