//! Synthetic tensors of known KTD structure; the constructive oracle behind
//! the recovery tests and the `synth` command.

use randla::gaussian_sketch;
use tensor_core::DenseTensor;

use crate::model::{DecomposeMethod, ModelMeta};
use crate::{DimsGrid, KtdError, KtdModel, Result};

/// Ground-truth singular-value profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumPreset {
    /// Descending integers R, R-1, ..., 1.
    Exact,
    /// ratio^(r-1).
    Geometric { ratio: f64 },
    /// R terms at 1 followed by R terms at `level`.
    FlatNoise { level: f64 },
}

pub fn preset_sigmas(preset: SpectrumPreset, rank: usize) -> Vec<f64> {
    match preset {
        SpectrumPreset::Exact => (0..rank).map(|r| (rank - r) as f64).collect(),
        SpectrumPreset::Geometric { ratio } => {
            (0..rank).map(|r| ratio.powi(r as i32)).collect()
        }
        SpectrumPreset::FlatNoise { level } => {
            let mut s = vec![1.0; rank];
            s.extend(std::iter::repeat_n(level, rank));
            s
        }
    }
}

/// Builds `sum_r sigma_r * block_r^(0) ⊗ ... ⊗ block_r^(M-1)` from random
/// unit-norm blocks, returning the tensor and the ground-truth model.
///
/// With `orthogonal` set, each block mode's vectorized blocks are drawn as
/// orthonormal columns (QR of a Gaussian draw), which makes the terms
/// mutually orthogonal: the model's sigmas are then exactly the composite
/// singular values a full decomposition recovers. Requires
/// `sigmas.len() <= min_m prod_n J_n^(m)` in that mode.
pub fn random_ktd_tensor(
    grid: &DimsGrid,
    sigmas: &[f64],
    seed: u64,
    orthogonal: bool,
) -> Result<(DenseTensor, KtdModel)> {
    if sigmas.is_empty() || sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(KtdError::InvalidSigmas);
    }
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rank = sorted.len();
    let m = grid.num_blocks();

    let mut per_block_vectors: Vec<Vec<Vec<f64>>> = Vec::with_capacity(m);
    for b in 0..m {
        let block_len = grid.block_len(b);
        if orthogonal && rank > block_len {
            return Err(KtdError::ModelInvariant {
                detail: format!(
                    "orthogonal synthesis needs rank <= {block_len} for block {b}, got {rank}"
                ),
            });
        }
        let draw = gaussian_sketch(block_len, rank, randla::rng::derive_seed(seed, b as u64));
        let columns: Vec<Vec<f64>> = if orthogonal {
            let q = draw.qr().q();
            (0..rank).map(|r| q.column(r).iter().copied().collect()).collect()
        } else {
            (0..rank)
                .map(|r| {
                    let col: Vec<f64> = draw.column(r).iter().copied().collect();
                    let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
                    col.into_iter().map(|x| x / norm).collect()
                })
                .collect()
        };
        per_block_vectors.push(columns);
    }

    let mut factors = Vec::with_capacity(rank);
    for r in 0..rank {
        let mut term = Vec::with_capacity(m);
        for b in 0..m {
            term.push(DenseTensor::from_vec(
                grid.block(b).to_vec(),
                per_block_vectors[b][r].clone(),
            )?);
        }
        factors.push(term);
    }
    let mut meta = ModelMeta::new(DecomposeMethod::Synthetic);
    meta.seed = seed;
    let model = KtdModel::new(grid.clone(), sorted, factors, meta)?;
    let x = model.reconstruct()?;
    Ok((x, model))
}
