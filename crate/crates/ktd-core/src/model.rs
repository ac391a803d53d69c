use serde::{Deserialize, Serialize};
use tensor_core::DenseTensor;

use crate::{DimsGrid, KtdError, Result};

/// How a model was computed; recorded in model metadata and `.ktdm` files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposeMethod {
    Deterministic,
    Randomized,
    PassEfficient,
    TuckerFirst,
    Synthetic,
}

impl DecomposeMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            DecomposeMethod::Deterministic => "deterministic",
            DecomposeMethod::Randomized => "randomized",
            DecomposeMethod::PassEfficient => "pass_efficient",
            DecomposeMethod::TuckerFirst => "tucker_first",
            DecomposeMethod::Synthetic => "synthetic",
        }
    }
}

/// Wall-clock phase timings in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub rearrange_ms: f64,
    pub tucker_ms: f64,
    pub factor_ms: f64,
    pub assemble_ms: f64,
    pub total_ms: f64,
}

/// Echo of the sketch knobs the model was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SketchMeta {
    pub rank: usize,
    pub oversampling: usize,
    pub power_q: usize,
    pub pass_budget: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub method: DecomposeMethod,
    pub timings: PhaseTimings,
    pub seed: u64,
    pub sketch: SketchMeta,
    /// Some requested rank exceeded what the data admits and was clamped.
    pub clamped: bool,
    /// Total data-matrix reads spent in sketched factorizations (0 for the
    /// deterministic route).
    pub passes: usize,
}

impl ModelMeta {
    pub fn new(method: DecomposeMethod) -> Self {
        Self {
            method,
            timings: PhaseTimings::default(),
            seed: 0,
            sketch: SketchMeta::default(),
            clamped: false,
            passes: 0,
        }
    }
}

/// Weighted sum of Kronecker products of unit-norm block tensors.
///
/// `factors[r][m]` has the dims of grid row `m`; term `r` reads
/// `sigmas[r] * factors[r][0] ⊗ factors[r][1] ⊗ ... ⊗ factors[r][M-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KtdModel {
    pub grid: DimsGrid,
    pub sigmas: Vec<f64>,
    pub factors: Vec<Vec<DenseTensor>>,
    pub meta: ModelMeta,
}

impl KtdModel {
    /// Validates the model invariants: positive nonincreasing sigmas,
    /// unit-norm factors of the grid's block shapes.
    pub fn new(
        grid: DimsGrid,
        sigmas: Vec<f64>,
        factors: Vec<Vec<DenseTensor>>,
        meta: ModelMeta,
    ) -> Result<Self> {
        if sigmas.len() != factors.len() {
            return Err(KtdError::ModelInvariant {
                detail: format!("{} sigmas but {} terms", sigmas.len(), factors.len()),
            });
        }
        for w in sigmas.windows(2) {
            if !(w[1] <= w[0]) {
                return Err(KtdError::ModelInvariant {
                    detail: "sigmas not nonincreasing".into(),
                });
            }
        }
        if sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(KtdError::ModelInvariant {
                detail: "sigmas must be finite and positive".into(),
            });
        }
        for (r, term) in factors.iter().enumerate() {
            if term.len() != grid.num_blocks() {
                return Err(KtdError::ModelInvariant {
                    detail: format!("term {r} has {} blocks, grid has {}", term.len(), grid.num_blocks()),
                });
            }
            for (m, block) in term.iter().enumerate() {
                if block.dims() != grid.block(m) {
                    return Err(KtdError::ModelInvariant {
                        detail: format!("term {r} block {m} dims {:?} != grid {:?}", block.dims(), grid.block(m)),
                    });
                }
                let norm = block.frobenius_norm();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(KtdError::ModelInvariant {
                        detail: format!("term {r} block {m} has norm {norm}"),
                    });
                }
            }
        }
        Ok(Self {
            grid,
            sigmas,
            factors,
            meta,
        })
    }

    pub fn num_terms(&self) -> usize {
        self.sigmas.len()
    }

    /// Dims of the tensor this model represents.
    pub fn target_dims(&self) -> Vec<usize> {
        self.grid.target_dims()
    }

    /// Scalars stored by the model: R sigmas plus R block tensors per factor.
    pub fn storage_scalars(&self) -> usize {
        let per_term: usize = 1 + (0..self.grid.num_blocks()).map(|m| self.grid.block_len(m)).sum::<usize>();
        self.num_terms() * per_term
    }

    /// Single term `sigmas[r] * kron chain`.
    pub fn term(&self, r: usize) -> Result<DenseTensor> {
        let blocks = &self.factors[r];
        let mut acc = blocks[0].clone();
        for block in &blocks[1..] {
            acc = acc.kron(block)?;
        }
        Ok(acc.scale(self.sigmas[r]))
    }

    /// Sum of all terms.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let dims = self.target_dims();
        let mut acc = DenseTensor::zeros(dims)?;
        for r in 0..self.num_terms() {
            acc = acc.add(&self.term(r)?)?;
        }
        Ok(acc)
    }

    /// Keeps the leading `rank` terms.
    pub fn truncated(&self, rank: usize) -> Self {
        let k = rank.min(self.num_terms());
        Self {
            grid: self.grid.clone(),
            sigmas: self.sigmas[..k].to_vec(),
            factors: self.factors[..k].to_vec(),
            meta: self.meta.clone(),
        }
    }
}

/// Relative truncation error predicted by the discarded singular-value mass:
/// `sqrt(sum of dropped sigma^2) / sqrt(sum of all sigma^2)`. `kept` must be
/// a prefix of `all`.
pub fn sigma_tail_error(kept: &[f64], all: &[f64]) -> Result<f64> {
    if all.is_empty() {
        return Err(KtdError::InvalidSigmas);
    }
    if kept.len() > all.len() || kept != &all[..kept.len()] {
        return Err(KtdError::InvalidSigmas);
    }
    let total: f64 = all.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let tail: f64 = all[kept.len()..].iter().map(|s| s * s).sum();
    Ok((tail / total).sqrt())
}
