use tensor_core::DenseTensor;

use crate::completion::{complete, CompletionConfig, CompletionState};
use crate::smooth::smooth_box3;
use crate::{AppsError, Result};

/// Mask observing every `stride`-th pixel along the first two modes (all
/// positions along the remaining modes): the regular grid a `stride`-times
/// down-sampled image provides.
pub fn downsample_mask(dims: &[usize], stride: usize) -> Result<DenseTensor> {
    if stride == 0 {
        return Err(AppsError::BadStride);
    }
    if dims.len() < 2 {
        return Err(AppsError::BadMode {
            mode: 1,
            order: dims.len(),
        });
    }
    Ok(DenseTensor::from_fn(dims.to_vec(), |idx| {
        if idx[0] % stride == 0 && idx[1] % stride == 0 {
            1.0
        } else {
            0.0
        }
    })?)
}

/// Fills the unobserved entries by normalized-kernel diffusion: values and
/// mask weights are box3-smoothed along the spatial modes until every
/// position has support, then each hole takes the weighted average.
/// Observed entries pass through untouched.
pub fn interpolate_observed(observed: &DenseTensor, mask: &DenseTensor) -> Result<DenseTensor> {
    let mut values = observed.clone();
    let mut weights = mask.clone();
    let max_passes = mask.dims().iter().max().copied().unwrap_or(1);
    for _ in 0..max_passes {
        if weights.data().iter().all(|&w| w > 1e-12) {
            break;
        }
        values = smooth_box3(&values, &[0, 1])?;
        weights = smooth_box3(&weights, &[0, 1])?;
    }
    let mut out = observed.clone();
    for (((slot, &m), &v), &w) in out
        .data_mut()
        .iter_mut()
        .zip(mask.data())
        .zip(values.data())
        .zip(weights.data())
    {
        if m != 1.0 {
            *slot = v / w.max(1e-12);
        }
    }
    Ok(out)
}

/// Treats the down-sampling grid as a completion mask and fills in the
/// missing pixels. The work tensor starts from the normalized-kernel
/// interpolation of the grid samples (a regular grid pins the plain
/// iteration to a spurious fixed point if started from zeros), then the
/// usual alternation refines it. Observed grid pixels pass through exactly.
pub fn super_resolve(state: &mut CompletionState, cfg: &CompletionConfig) -> Result<DenseTensor> {
    let interpolated = interpolate_observed(state.observed(), state.mask())?;
    state.iterate = interpolated;
    complete(state, cfg)
}
