use ktd_core::{ktd_decompose, DecomposeMethod, DimsGrid, KtdModel, PhaseTimings, SketchConfig};
use tensor_core::DenseTensor;

use crate::metrics::{psnr, relative_error};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionMetrics {
    pub relative_error: f64,
    pub psnr_db: f64,
    /// Peak used for the PSNR: the input's largest magnitude (1 for an
    /// all-zero input). Callers with 8-bit image data should treat 255 as
    /// the effective peak and may recompute.
    pub peak: f64,
    /// Stored model scalars over tensor entries.
    pub compression_ratio: f64,
    pub timings: PhaseTimings,
}

/// Decompose-and-measure: the model plus reconstruction quality, storage
/// ratio and phase timings.
pub fn compress(
    x: &DenseTensor,
    grid: &DimsGrid,
    rank: usize,
    method: DecomposeMethod,
    cfg: &SketchConfig,
) -> Result<(KtdModel, CompressionMetrics)> {
    let model = ktd_decompose(x, grid, rank, method, cfg)?;
    let approx = model.reconstruct()?;
    let rel = relative_error(x, &approx)?;
    let peak = x
        .data()
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let peak = if peak <= f64::MIN_POSITIVE { 1.0 } else { peak };
    let psnr_db = psnr(x, &approx, peak)?;
    let metrics = CompressionMetrics {
        relative_error: rel,
        psnr_db,
        peak,
        compression_ratio: model.storage_scalars() as f64 / x.len() as f64,
        timings: model.meta.timings,
    };
    Ok((model, metrics))
}
