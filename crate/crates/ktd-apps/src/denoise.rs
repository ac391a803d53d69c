use ktd_core::{ktd_decompose, DecomposeMethod, DimsGrid, SketchConfig};
use tensor_core::DenseTensor;

use crate::Result;

/// Rank-R reconstruction of the noisy input plus the residual
/// `input - reconstruction`, so reconstruction + residual gives back the
/// input by definition.
pub fn denoise(
    noisy: &DenseTensor,
    grid: &DimsGrid,
    rank: usize,
    method: DecomposeMethod,
    cfg: &SketchConfig,
) -> Result<(DenseTensor, DenseTensor)> {
    let model = ktd_decompose(noisy, grid, rank, method, cfg)?;
    let denoised = model.reconstruct()?;
    let residual = noisy.sub(&denoised)?;
    Ok((denoised, residual))
}
