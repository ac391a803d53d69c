//! Branching truncated SVDs on successive unfoldings.
//!
//! Level 0 factors the mode-0 unfolding; each retained right singular vector
//! is folded back into a tensor of the remaining modes and factored again.
//! A leaf holds one vector per level plus the product of the singular values
//! along its branch (the composite singular value). Leaves of distinct
//! branches are mutually orthogonal rank-1 terms, so composite values sort
//! and truncate exactly like matrix singular values.

use randla::{rsvd, truncated_svd, SketchConfig, TruncatedSvd};
use tensor_core::DenseTensor;

use crate::{to_matrix, KtdError, Result};

/// One branch of the tree: per-level vectors (lengths follow the input dims),
/// the per-level singular values, and their product.
#[derive(Debug, Clone, PartialEq)]
pub struct Ttr1Leaf {
    pub vectors: Vec<Vec<f64>>,
    pub local_sigmas: Vec<f64>,
    pub composite_sigma: f64,
}

impl Ttr1Leaf {
    /// The rank-1 term as a full tensor: composite times the outer chain.
    pub fn to_tensor(&self) -> Result<DenseTensor> {
        let mut acc = DenseTensor::from_vec1(self.vectors[0].clone())?;
        for v in &self.vectors[1..] {
            acc = acc.outer_product(&DenseTensor::from_vec1(v.clone())?);
        }
        Ok(acc.scale(self.composite_sigma))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ttr1Tree {
    pub input_dims: Vec<usize>,
    pub level_ranks: Vec<usize>,
    /// Depth-first, branch-index order; deterministic for a given input.
    pub leaves: Vec<Ttr1Leaf>,
    /// A level rank exceeded what a branch admitted and was clamped.
    pub clamped: bool,
    /// Accumulated data reads across all inner factorizations.
    pub passes: usize,
}

impl Ttr1Tree {
    /// Sum of all rank-1 terms; the reconstruction oracle for tests.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let mut acc = DenseTensor::zeros(self.input_dims.clone())?;
        for leaf in &self.leaves {
            acc = acc.add(&leaf.to_tensor()?)?;
        }
        Ok(acc)
    }
}

enum Backend<'a> {
    Deterministic,
    Randomized(&'a SketchConfig),
}

impl Backend<'_> {
    fn factor(&self, m: &randla::Matrix, rank: usize, stream: &mut u64) -> Result<TruncatedSvd> {
        match self {
            Backend::Deterministic => Ok(truncated_svd(m, rank)?),
            Backend::Randomized(cfg) => {
                let mut local = (*cfg).clone();
                local.rank = rank;
                local.seed = randla::rng::derive_seed(cfg.seed, *stream);
                *stream += 1;
                Ok(rsvd(m, &local)?)
            }
        }
    }

    fn counts_passes(&self) -> bool {
        matches!(self, Backend::Randomized(_))
    }
}

struct TreeBuilder<'a> {
    backend: Backend<'a>,
    level_ranks: &'a [usize],
    leaves: Vec<Ttr1Leaf>,
    prefix_vectors: Vec<Vec<f64>>,
    prefix_sigmas: Vec<f64>,
    clamped: bool,
    passes: usize,
    stream: u64,
}

impl TreeBuilder<'_> {
    fn expand(&mut self, t: &DenseTensor, level: usize) -> Result<()> {
        let matrix = to_matrix(&t.unfold(0)?);
        let requested = self.level_ranks[level];
        let cap = matrix.nrows().min(matrix.ncols());
        let rank = requested.min(cap);
        if rank < requested {
            self.clamped = true;
        }
        let svd = self.backend.factor(&matrix, rank, &mut self.stream)?;
        if self.backend.counts_passes() {
            self.passes += svd.passes;
        }
        self.clamped |= svd.clamped;

        for r in 0..svd.rank() {
            let u: Vec<f64> = svd.left.column(r).iter().copied().collect();
            let v: Vec<f64> = svd.right.column(r).iter().copied().collect();
            let sigma = svd.singulars[r];
            self.prefix_vectors.push(u);
            self.prefix_sigmas.push(sigma);
            if t.order() == 2 {
                let mut vectors = self.prefix_vectors.clone();
                vectors.push(v);
                self.leaves.push(Ttr1Leaf {
                    vectors,
                    local_sigmas: self.prefix_sigmas.clone(),
                    composite_sigma: self.prefix_sigmas.iter().product(),
                });
            } else {
                let sub = DenseTensor::from_vec(t.dims()[1..].to_vec(), v)?;
                self.expand(&sub, level + 1)?;
            }
            self.prefix_vectors.pop();
            self.prefix_sigmas.pop();
        }
        Ok(())
    }
}

fn build_tree(y: &DenseTensor, level_ranks: &[usize], backend: Backend) -> Result<Ttr1Tree> {
    if y.order() < 2 {
        return Err(KtdError::OrderTooLow { order: y.order() });
    }
    if level_ranks.len() != y.order() - 1 {
        return Err(KtdError::LevelRanks {
            expected: y.order() - 1,
            got: level_ranks.len(),
        });
    }
    if level_ranks.contains(&0) {
        return Err(KtdError::InvalidRank);
    }
    let mut builder = TreeBuilder {
        backend,
        level_ranks,
        leaves: Vec::new(),
        prefix_vectors: Vec::new(),
        prefix_sigmas: Vec::new(),
        clamped: false,
        passes: 0,
        stream: 0,
    };
    builder.expand(y, 0)?;
    Ok(Ttr1Tree {
        input_dims: y.dims().to_vec(),
        level_ranks: level_ranks.to_vec(),
        leaves: builder.leaves,
        clamped: builder.clamped,
        passes: builder.passes,
    })
}

/// Deterministic tree: every factorization is an exact truncated SVD.
pub fn ttr1svd(y: &DenseTensor, level_ranks: &[usize]) -> Result<Ttr1Tree> {
    build_tree(y, level_ranks, Backend::Deterministic)
}

/// Randomized tree: every truncated SVD routed through the sketched
/// factorization (or the pass-efficient schedule when `cfg.pass_budget` is
/// set). Per-factorization seeds derive from `cfg.seed` in traversal order,
/// so identical seeds give identical trees.
pub fn r_ttr1svd(y: &DenseTensor, level_ranks: &[usize], cfg: &SketchConfig) -> Result<Ttr1Tree> {
    build_tree(y, level_ranks, Backend::Randomized(cfg))
}
