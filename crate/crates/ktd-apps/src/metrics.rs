use tensor_core::DenseTensor;

use crate::{AppsError, Result};

/// Peak signal-to-noise ratio in dB: `10 log10(peak^2 / MSE)`, computed by a
/// direct elementwise loop. Identical inputs give `f64::INFINITY`.
pub fn psnr(reference: &DenseTensor, approx: &DenseTensor, peak: f64) -> Result<f64> {
    if reference.dims() != approx.dims() {
        return Err(AppsError::DimMismatch {
            left: reference.dims().to_vec(),
            right: approx.dims().to_vec(),
        });
    }
    if !(peak > 0.0) {
        return Err(AppsError::BadPeak { got: peak });
    }
    let mut acc = 0.0f64;
    for (a, b) in reference.data().iter().zip(approx.data()) {
        let d = a - b;
        acc += d * d;
    }
    let mse = acc / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// `||x - approx||_F / ||x||_F`.
pub fn relative_error(x: &DenseTensor, approx: &DenseTensor) -> Result<f64> {
    if x.dims() != approx.dims() {
        return Err(AppsError::DimMismatch {
            left: x.dims().to_vec(),
            right: approx.dims().to_vec(),
        });
    }
    Ok(approx.sub(x)?.frobenius_norm() / x.frobenius_norm())
}
