use std::time::Instant;

use randla::SketchConfig;
use tensor_core::DenseTensor;

use crate::model::{DecomposeMethod, KtdModel, ModelMeta, PhaseTimings, SketchMeta};
use crate::ttr1::{r_ttr1svd, ttr1svd, Ttr1Tree};
use crate::{ktd_permute_reshape, DimsGrid, KtdError, Result};

/// Leaves with composite sigma at or below this fraction of the largest are
/// treated as zero terms and dropped.
pub(crate) const ZERO_SIGMA_REL: f64 = 1e-13;

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Keeps the top-`rank` leaves by composite sigma and reshapes each branch's
/// per-level vectors into unit-norm block tensors. Leaf vector `k`
/// corresponds to grid row `M-1-k` (the rearrangement reverses block order).
pub fn tree_to_model(tree: &Ttr1Tree, grid: &DimsGrid, rank: usize) -> Result<KtdModel> {
    if rank == 0 {
        return Err(KtdError::InvalidRank);
    }
    let m = grid.num_blocks();
    if tree.input_dims.len() != m {
        return Err(KtdError::LeafShape {
            expected: m,
            got: tree.input_dims.len(),
        });
    }
    for k in 0..m {
        let expected = grid.block_len(m - 1 - k);
        if tree.input_dims[k] != expected {
            return Err(KtdError::LeafShape {
                expected,
                got: tree.input_dims[k],
            });
        }
    }

    let mut order: Vec<usize> = (0..tree.leaves.len()).collect();
    order.sort_by(|&a, &b| {
        tree.leaves[b]
            .composite_sigma
            .partial_cmp(&tree.leaves[a].composite_sigma)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sigma_max = order
        .first()
        .map(|&i| tree.leaves[i].composite_sigma)
        .unwrap_or(0.0);

    let mut sigmas = Vec::new();
    let mut factors = Vec::new();
    for &i in order.iter().take(rank) {
        let leaf = &tree.leaves[i];
        if leaf.composite_sigma <= ZERO_SIGMA_REL * sigma_max {
            break; // sorted, so everything after is zero too
        }
        let mut blocks = Vec::with_capacity(m);
        for b in 0..m {
            let vec_k = &leaf.vectors[m - 1 - b];
            if vec_k.len() != grid.block_len(b) {
                return Err(KtdError::LeafShape {
                    expected: grid.block_len(b),
                    got: vec_k.len(),
                });
            }
            blocks.push(DenseTensor::from_vec(grid.block(b).to_vec(), vec_k.clone())?);
        }
        sigmas.push(leaf.composite_sigma);
        factors.push(blocks);
    }
    KtdModel::new(
        grid.clone(),
        sigmas,
        factors,
        ModelMeta::new(DecomposeMethod::Deterministic),
    )
}

/// Decomposes `x` into the KTD of the given grid and rank.
///
/// Deterministic and randomized routes rearrange, grow the factorization
/// tree with one rank-`rank` truncation per level, and keep the top-`rank`
/// composite values. The Tucker-first route defaults its per-mode
/// compression ranks to `min(rank, extent)`; call
/// [`pt_ktd`](crate::pt_ktd) directly to choose them.
pub fn ktd_decompose(
    x: &DenseTensor,
    grid: &DimsGrid,
    rank: usize,
    method: DecomposeMethod,
    cfg: &SketchConfig,
) -> Result<KtdModel> {
    if let DecomposeMethod::TuckerFirst = method {
        let ml_ranks: Vec<usize> = x.dims().iter().map(|&d| rank.min(d)).collect();
        return crate::pt_ktd(x, grid, rank, &ml_ranks, cfg);
    }

    grid.validate_for(x.dims())?;
    if rank == 0 {
        return Err(KtdError::InvalidRank);
    }
    let start = Instant::now();
    if grid.num_blocks() == 1 {
        return trivial_single_block(x, grid, method, cfg, start);
    }

    let y = ktd_permute_reshape(x, grid)?;
    let rearrange_ms = ms(start);

    let factor_start = Instant::now();
    let level_ranks = vec![rank; grid.num_blocks() - 1];
    let tree = match method {
        DecomposeMethod::Deterministic => ttr1svd(&y, &level_ranks)?,
        DecomposeMethod::Randomized => r_ttr1svd(&y, &level_ranks, cfg)?,
        DecomposeMethod::PassEfficient => {
            let mut local = cfg.clone();
            if local.pass_budget.is_none() {
                local.pass_budget = Some(3);
            }
            r_ttr1svd(&y, &level_ranks, &local)?
        }
        DecomposeMethod::TuckerFirst | DecomposeMethod::Synthetic => unreachable!(),
    };
    let factor_ms = ms(factor_start);

    let assemble_start = Instant::now();
    let mut model = tree_to_model(&tree, grid, rank)?;
    model.meta = ModelMeta {
        method,
        timings: PhaseTimings {
            rearrange_ms,
            tucker_ms: 0.0,
            factor_ms,
            assemble_ms: ms(assemble_start),
            total_ms: ms(start),
        },
        seed: cfg.seed,
        sketch: sketch_meta_of(cfg),
        clamped: tree.clamped,
        passes: tree.passes,
    };
    Ok(model)
}

/// M == 1: the model is the single normalized block with sigma = ||x||.
fn trivial_single_block(
    x: &DenseTensor,
    grid: &DimsGrid,
    method: DecomposeMethod,
    cfg: &SketchConfig,
    start: Instant,
) -> Result<KtdModel> {
    let norm = x.frobenius_norm();
    let (sigmas, factors) = if norm > 0.0 {
        (vec![norm], vec![vec![x.scale(1.0 / norm)]])
    } else {
        (Vec::new(), Vec::new())
    };
    let mut model = KtdModel::new(grid.clone(), sigmas, factors, ModelMeta::new(method))?;
    model.meta.seed = cfg.seed;
    model.meta.sketch = sketch_meta_of(cfg);
    model.meta.timings.total_ms = ms(start);
    Ok(model)
}

pub(crate) fn sketch_meta_of(cfg: &SketchConfig) -> SketchMeta {
    SketchMeta {
        rank: cfg.rank,
        oversampling: cfg.oversampling,
        power_q: cfg.power_q,
        pass_budget: cfg.pass_budget,
    }
}
