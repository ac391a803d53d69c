//! Multilinear (Tucker) compression and the Tucker-first KTD route.

use std::time::Instant;

use randla::{rsvd, Matrix, SketchConfig};
use tensor_core::DenseTensor;

use crate::decompose::sketch_meta_of;
use crate::model::{DecomposeMethod, ModelMeta, PhaseTimings};
use crate::ttr1::r_ttr1svd;
use crate::{from_matrix, ktd_permute_reshape, to_matrix, DimsGrid, KtdError, KtdModel, Result};

/// Seed stream offset keeping Tucker sketches disjoint from tree sketches.
const TUCKER_STREAM: u64 = 1 << 32;

/// Mode-`mode` product with a matrix: unfold, multiply from the left, fold.
pub fn mode_multiply(t: &DenseTensor, mat: &Matrix, mode: usize) -> Result<DenseTensor> {
    let unfolded = to_matrix(&t.unfold(mode)?);
    let product = mat * unfolded;
    let mut dims = t.dims().to_vec();
    dims[mode] = mat.nrows();
    Ok(DenseTensor::fold(&from_matrix(&product), mode, &dims)?)
}

/// Sequentially truncated randomized multilinear compression: for each mode
/// in turn, the current core's unfolding is factored by the sketched SVD and
/// projected onto its leading left singular vectors. Modes requested at full
/// rank are left untouched (identity factor).
///
/// Returns the core and one column-orthonormal factor matrix per mode, with
/// `x ≈ core ×_0 U_0 ×_1 U_1 ...`.
pub fn tucker_compress(
    x: &DenseTensor,
    ml_ranks: &[usize],
    cfg: &SketchConfig,
) -> Result<(DenseTensor, Vec<Matrix>)> {
    if ml_ranks.len() != x.order() {
        return Err(KtdError::GridShape {
            detail: format!(
                "{} multilinear ranks for an order-{} tensor",
                ml_ranks.len(),
                x.order()
            ),
        });
    }
    for (n, (&r, &d)) in ml_ranks.iter().zip(x.dims()).enumerate() {
        if r == 0 || r > d {
            return Err(KtdError::MlRanks {
                mode: n,
                extent: d,
                got: r,
            });
        }
    }

    let mut core = x.clone();
    let mut factors = Vec::with_capacity(x.order());
    for n in 0..x.order() {
        let extent = core.dims()[n];
        if ml_ranks[n] == extent {
            factors.push(Matrix::identity(extent, extent));
            continue;
        }
        let unfolded = to_matrix(&core.unfold(n)?);
        let mut local = cfg.clone();
        local.rank = ml_ranks[n];
        local.seed = randla::rng::derive_seed(cfg.seed, TUCKER_STREAM + n as u64);
        let svd = rsvd(&unfolded, &local)?;
        let basis = svd.left;
        let projected = basis.transpose() * unfolded;
        let mut dims = core.dims().to_vec();
        dims[n] = basis.ncols();
        core = DenseTensor::fold(&from_matrix(&projected), n, &dims)?;
        factors.push(basis);
    }
    Ok((core, factors))
}

/// `core ×_0 U_0 ×_1 U_1 ...`.
pub fn tucker_reconstruct(core: &DenseTensor, factors: &[Matrix]) -> Result<DenseTensor> {
    let mut t = core.clone();
    for (n, f) in factors.iter().enumerate() {
        t = mode_multiply(&t, f, n)?;
    }
    Ok(t)
}

/// Tucker-first KTD: compress the rearranged tensor along its block modes,
/// grow the randomized factorization tree on the core, then map each leaf's
/// per-mode vectors back through the Tucker factors before the final block
/// reshape. Orthonormal factors preserve unit norms and term orthogonality,
/// so the result is a model of the original tensor and its error is at most
/// the Tucker error plus the core decomposition error.
///
/// `ml_ranks` caps (per original mode `n`, clamped to the extents) induce the
/// block-mode compression sizes `prod_n min(ml_ranks[n], J_n^(m))`. Caps that
/// come out full skip the compression entirely, which makes
/// `ml_ranks == dims` coincide with the plain randomized route seed for seed.
pub fn pt_ktd(
    x: &DenseTensor,
    grid: &DimsGrid,
    rank: usize,
    ml_ranks: &[usize],
    cfg: &SketchConfig,
) -> Result<KtdModel> {
    grid.validate_for(x.dims())?;
    if rank == 0 {
        return Err(KtdError::InvalidRank);
    }
    if ml_ranks.len() != x.order() {
        return Err(KtdError::GridShape {
            detail: format!(
                "{} multilinear ranks for an order-{} tensor",
                ml_ranks.len(),
                x.order()
            ),
        });
    }
    if ml_ranks.contains(&0) {
        return Err(KtdError::InvalidRank);
    }
    let start = Instant::now();
    let m = grid.num_blocks();
    if m == 1 {
        let mut model = crate::ktd_decompose(x, grid, rank, DecomposeMethod::Deterministic, cfg)?;
        model.meta.method = DecomposeMethod::TuckerFirst;
        return Ok(model);
    }
    let clamped_ml: Vec<usize> = ml_ranks.iter().zip(x.dims()).map(|(&r, &d)| r.min(d)).collect();

    let y = ktd_permute_reshape(x, grid)?;
    let rearrange_ms = start.elapsed().as_secs_f64() * 1e3;

    // block-mode caps induced by the per-mode multilinear ranks
    let caps: Vec<usize> = (0..m)
        .map(|k| {
            let block = grid.block(m - 1 - k);
            let induced: usize = block
                .iter()
                .zip(&clamped_ml)
                .map(|(&j, &r)| r.min(j))
                .product();
            induced.min(y.dims()[k])
        })
        .collect();

    let tucker_start = Instant::now();
    let full = caps.iter().zip(y.dims()).all(|(&c, &d)| c == d);
    let (core, factors) = if full {
        (y.clone(), Vec::new())
    } else {
        tucker_compress(&y, &caps, cfg)?
    };
    let tucker_ms = tucker_start.elapsed().as_secs_f64() * 1e3;

    let factor_start = Instant::now();
    let level_ranks = vec![rank; m - 1];
    let mut tree = r_ttr1svd(&core, &level_ranks, cfg)?;
    let factor_ms = factor_start.elapsed().as_secs_f64() * 1e3;

    let assemble_start = Instant::now();
    if !full {
        for leaf in &mut tree.leaves {
            for (k, vec) in leaf.vectors.iter_mut().enumerate() {
                let mapped = &factors[k] * Matrix::from_column_slice(vec.len(), 1, vec);
                *vec = mapped.column(0).iter().copied().collect();
            }
        }
        tree.input_dims = y.dims().to_vec();
    }
    let mut model = crate::tree_to_model(&tree, grid, rank)?;
    model.meta = ModelMeta {
        method: DecomposeMethod::TuckerFirst,
        timings: PhaseTimings {
            rearrange_ms,
            tucker_ms,
            factor_ms,
            assemble_ms: assemble_start.elapsed().as_secs_f64() * 1e3,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        seed: cfg.seed,
        sketch: sketch_meta_of(cfg),
        clamped: tree.clamped,
        passes: tree.passes,
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_ktd_tensor;
    use crate::{ktd_decompose, ktd_permute_reshape_inverse};

    fn rel_err(x: &DenseTensor, approx: &DenseTensor) -> f64 {
        approx.sub(x).unwrap().frobenius_norm() / x.frobenius_norm()
    }

    fn random_orthonormal(rows: usize, cols: usize, seed: u64) -> Matrix {
        randla::gaussian_sketch(rows, cols, seed).qr().q()
    }

    #[test]
    fn tucker_recovers_exact_multilinear_rank() {
        // synthesize core x factors, then compress back
        let core = DenseTensor::from_fn(vec![2, 2, 2], |i| {
            ((i[0] * 4 + i[1] * 2 + i[2]) as f64 * 0.77).sin() + 0.4
        })
        .unwrap();
        let factors: Vec<Matrix> = [(6, 101u64), (5, 102), (7, 103)]
            .iter()
            .map(|&(rows, seed)| random_orthonormal(rows, 2, seed))
            .collect();
        let x = tucker_reconstruct(&core, &factors).unwrap();
        let cfg = SketchConfig::new(2).with_power(1).with_seed(9);
        let (got_core, got_factors) = tucker_compress(&x, &[2, 2, 2], &cfg).unwrap();
        assert_eq!(got_core.dims(), &[2, 2, 2]);
        let back = tucker_reconstruct(&got_core, &got_factors).unwrap();
        assert!(rel_err(&x, &back) <= 1e-8);
    }

    #[test]
    fn tucker_full_ranks_lossless() {
        let x = DenseTensor::from_fn(vec![3, 4, 2], |i| (i[0] * 8 + i[1] * 2 + i[2]) as f64 - 5.0)
            .unwrap();
        let cfg = SketchConfig::new(4).with_seed(1);
        let (core, factors) = tucker_compress(&x, &[3, 4, 2], &cfg).unwrap();
        assert_eq!(core, x);
        let back = tucker_reconstruct(&core, &factors).unwrap();
        assert!(rel_err(&x, &back) <= 1e-10);
    }

    #[test]
    fn tucker_core_norm_contracts() {
        let x = DenseTensor::from_fn(vec![5, 5, 5], |i| {
            ((i[0] * 25 + i[1] * 5 + i[2]) as f64).cos()
        })
        .unwrap();
        let cfg = SketchConfig::new(3).with_power(1).with_seed(4);
        let (core, _) = tucker_compress(&x, &[3, 3, 3], &cfg).unwrap();
        assert!(core.frobenius_norm() <= x.frobenius_norm() + 1e-10);
    }

    #[test]
    fn tucker_rejects_bad_ranks() {
        let x = DenseTensor::zeros(vec![3, 3]).unwrap();
        let cfg = SketchConfig::new(2);
        assert!(matches!(
            tucker_compress(&x, &[3, 4], &cfg),
            Err(KtdError::MlRanks { mode: 1, .. })
        ));
        assert!(tucker_compress(&x, &[3], &cfg).is_err());
        assert!(tucker_compress(&x, &[0, 2], &cfg).is_err());
    }

    #[test]
    fn pt_ktd_exact_rank_with_compression() {
        // blocks 4x4 and 4x4, rank 2; ml caps 3 compress each block mode to 9 < 16
        let grid = DimsGrid::new(vec![vec![4, 4], vec![4, 4]]).unwrap();
        let (x, _) = random_ktd_tensor(&grid, &[2.0, 1.0], 31, true).unwrap();
        let cfg = SketchConfig::new(2).with_power(1).with_seed(12);
        let model = pt_ktd(&x, &grid, 2, &[3, 3], &cfg).unwrap();
        assert_eq!(model.meta.method, DecomposeMethod::TuckerFirst);
        let err = rel_err(&x, &model.reconstruct().unwrap());
        assert!(err <= 1e-6, "err {err}");
    }

    #[test]
    fn pt_ktd_error_bounded_by_stage_errors() {
        let grid = DimsGrid::new(vec![vec![4, 4], vec![4, 4]]).unwrap();
        // inexact input: exact rank 3 but decompose at rank 2 with tight caps
        let (x, _) = random_ktd_tensor(&grid, &[2.0, 1.0, 0.4], 77, true).unwrap();
        let cfg = SketchConfig::new(2).with_power(2).with_seed(3);

        // replay the two stages with the same seeds pt_ktd derives
        let y = crate::ktd_permute_reshape(&x, &grid).unwrap();
        let caps = [9usize, 9];
        let (core, factors) = tucker_compress(&y, &caps, &cfg).unwrap();
        let y_hat = tucker_reconstruct(&core, &factors).unwrap();
        let tucker_err = y_hat.sub(&y).unwrap().frobenius_norm();

        let core_tree = r_ttr1svd(&core, &[2], &cfg).unwrap();
        let mut leaves = core_tree.leaves.clone();
        leaves.sort_by(|a, b| b.composite_sigma.partial_cmp(&a.composite_sigma).unwrap());
        let mut kept = DenseTensor::zeros(core.dims().to_vec()).unwrap();
        for leaf in leaves.iter().take(2) {
            kept = kept.add(&leaf.to_tensor().unwrap()).unwrap();
        }
        let core_err = kept.sub(&core).unwrap().frobenius_norm();

        let model = pt_ktd(&x, &grid, 2, &[3, 3], &cfg).unwrap();
        let total = model
            .reconstruct()
            .unwrap()
            .sub(&x)
            .unwrap()
            .frobenius_norm();
        assert!(
            total <= tucker_err + core_err + 1e-9,
            "{total} vs {tucker_err} + {core_err}"
        );
    }

    #[test]
    fn pt_ktd_full_caps_match_randomized_route() {
        let grid = DimsGrid::new(vec![vec![2, 2], vec![3, 2]]).unwrap();
        let (x, _) = random_ktd_tensor(&grid, &[1.5, 0.75], 8, true).unwrap();
        let cfg = SketchConfig::new(2).with_power(1).with_seed(19);
        let pt = pt_ktd(&x, &grid, 2, x.dims(), &cfg).unwrap();
        let plain = ktd_decompose(&x, &grid, 2, DecomposeMethod::Randomized, &cfg).unwrap();
        assert_eq!(pt.sigmas, plain.sigmas);
        assert_eq!(pt.factors, plain.factors);
        assert_eq!(pt.meta.method, DecomposeMethod::TuckerFirst);
        assert!(pt.meta.timings.total_ms >= 0.0);
    }

    #[test]
    fn rearrange_inverse_is_exact() {
        let grid = DimsGrid::new(vec![vec![2, 2], vec![2, 3]]).unwrap();
        let x = DenseTensor::from_fn(grid.target_dims(), |i| (i[0] * 6 + i[1]) as f64 * 0.3)
            .unwrap();
        let y = ktd_permute_reshape(&x, &grid).unwrap();
        let back = ktd_permute_reshape_inverse(&y, &grid, x.dims()).unwrap();
        assert_eq!(back, x);
    }
}
