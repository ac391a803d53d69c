use tensor_core::index::{decode_row_major, row_major_strides};
use tensor_core::DenseTensor;

use crate::{AppsError, Result};

/// Separable 3-point moving average (weights 1/4, 1/2, 1/4, replicated
/// boundary) along each listed mode. Linear; constant tensors are fixed
/// points.
pub fn smooth_box3(t: &DenseTensor, modes: &[usize]) -> Result<DenseTensor> {
    for &mode in modes {
        if mode >= t.order() {
            return Err(AppsError::BadMode {
                mode,
                order: t.order(),
            });
        }
    }
    let mut current = t.clone();
    for &mode in modes {
        current = smooth_one_mode(&current, mode);
    }
    Ok(current)
}

fn smooth_one_mode(t: &DenseTensor, mode: usize) -> DenseTensor {
    let dims = t.dims().to_vec();
    let strides = row_major_strides(&dims);
    let extent = dims[mode];
    let stride = strides[mode];
    let mut out = vec![0.0; t.len()];
    let mut idx = vec![0usize; dims.len()];
    for (flat, slot) in out.iter_mut().enumerate() {
        decode_row_major(flat, &strides, &mut idx);
        let k = idx[mode];
        let prev = if k == 0 { flat } else { flat - stride };
        let next = if k + 1 == extent { flat } else { flat + stride };
        let data = t.data();
        *slot = 0.25 * data[prev] + 0.5 * data[flat] + 0.25 * data[next];
    }
    DenseTensor::new(dims, out).expect("smoothing preserves shape")
}
