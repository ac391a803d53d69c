//! Seeded noise generators for the denoising experiments.

use rand::Rng;
use rand_distr::StandardNormal;
use randla::rng::rng_from_seed;
use tensor_core::DenseTensor;

/// Adds i.i.d. zero-mean Gaussian noise of the given standard deviation.
pub fn gaussian(t: &DenseTensor, sigma: f64, seed: u64) -> DenseTensor {
    let mut rng = rng_from_seed(seed);
    let data = t
        .data()
        .iter()
        .map(|&x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    DenseTensor::new(t.dims().to_vec(), data).expect("same shape")
}

/// Each entry independently becomes 0 or `peak`, each with probability
/// `density / 2`.
pub fn salt_pepper(t: &DenseTensor, density: f64, peak: f64, seed: u64) -> DenseTensor {
    let mut rng = rng_from_seed(seed);
    let data = t
        .data()
        .iter()
        .map(|&x| {
            let u: f64 = rng.random();
            if u < density / 2.0 {
                0.0
            } else if u < density {
                peak
            } else {
                x
            }
        })
        .collect();
    DenseTensor::new(t.dims().to_vec(), data).expect("same shape")
}

/// Multiplicative `x * (1 + u)` with `u` uniform, zero mean and the given
/// variance.
pub fn speckle(t: &DenseTensor, variance: f64, seed: u64) -> DenseTensor {
    let mut rng = rng_from_seed(seed);
    let half_width = (3.0 * variance).sqrt();
    let data = t
        .data()
        .iter()
        .map(|&x| {
            let u: f64 = rng.random_range(-half_width..=half_width);
            x * (1.0 + u)
        })
        .collect();
    DenseTensor::new(t.dims().to_vec(), data).expect("same shape")
}
