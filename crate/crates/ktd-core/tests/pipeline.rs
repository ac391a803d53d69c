//! End-to-end checks of the rearrangement/factorization pipeline.

use ktd_core::{
    ktd_decompose, ktd_permute_reshape, synth::random_ktd_tensor, DecomposeMethod, DenseTensor,
    DimsGrid, SketchConfig,
};
use randla::truncated_svd;

fn rel_err(x: &DenseTensor, approx: &DenseTensor) -> f64 {
    approx.sub(x).unwrap().frobenius_norm() / x.frobenius_norm()
}

fn random_unit_tensor(dims: Vec<usize>, seed: u64) -> DenseTensor {
    let len: usize = dims.iter().product();
    let draw = randla::gaussian_sketch(len, 1, seed);
    let data: Vec<f64> = draw.column(0).iter().copied().collect();
    let t = DenseTensor::new(dims, data).unwrap();
    let n = t.frobenius_norm();
    t.scale(1.0 / n)
}

#[test]
fn rearranged_kron_is_numerically_rank_one() {
    // random order-3 blocks; the rearrangement of their Kronecker product
    // must be a rank-1 matrix whose leading pair recovers both blocks
    for seed in 0..5u64 {
        let a = random_unit_tensor(vec![2, 3, 2], 100 + seed);
        let b = random_unit_tensor(vec![3, 2, 2], 200 + seed);
        let x = a.kron(&b).unwrap();
        let grid = DimsGrid::new(vec![a.dims().to_vec(), b.dims().to_vec()]).unwrap();
        let y = ktd_permute_reshape(&x, &grid).unwrap();

        let matrix = randla::Matrix::from_row_slice(y.dims()[0], y.dims()[1], y.data());
        let svd = truncated_svd(&matrix, 2).unwrap();
        assert!(svd.singulars[1] <= 1e-10 * svd.singulars[0], "seed {seed}");

        let u: Vec<f64> = svd.left.column(0).iter().copied().collect();
        let v: Vec<f64> = svd.right.column(0).iter().copied().collect();
        let b_rec = DenseTensor::from_vec(b.dims().to_vec(), u).unwrap();
        let a_rec = DenseTensor::from_vec(a.dims().to_vec(), v).unwrap();
        let align = |rec: &DenseTensor, truth: &DenseTensor| -> f64 {
            let dot: f64 = rec.data().iter().zip(truth.data()).map(|(p, q)| p * q).sum();
            let flipped = if dot < 0.0 { rec.scale(-1.0) } else { rec.clone() };
            flipped.sub(truth).unwrap().frobenius_norm()
        };
        assert!(align(&a_rec, &a) <= 1e-10, "seed {seed}");
        assert!(align(&b_rec, &b) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn desk_scale_exact_rank_recovery_all_methods() {
    // 20x20x20x20, blocks 4^4 x 5^4, exact rank 5
    let grid = DimsGrid::new(vec![vec![4, 4, 4, 4], vec![5, 5, 5, 5]]).unwrap();
    let sigmas: Vec<f64> = (0..5).map(|r| (5 - r) as f64).collect();
    let (x, _) = random_ktd_tensor(&grid, &sigmas, 42, true).unwrap();
    assert_eq!(x.dims(), &[20, 20, 20, 20]);

    let det = ktd_decompose(
        &x,
        &grid,
        5,
        DecomposeMethod::Deterministic,
        &SketchConfig::new(5),
    )
    .unwrap();
    assert!(rel_err(&x, &det.reconstruct().unwrap()) <= 1e-8);

    let cfg = SketchConfig::new(5).with_oversampling(5).with_power(1).with_seed(7);
    for method in [
        DecomposeMethod::Randomized,
        DecomposeMethod::PassEfficient,
        DecomposeMethod::TuckerFirst,
    ] {
        let model = ktd_decompose(&x, &grid, 5, method, &cfg).unwrap();
        let err = rel_err(&x, &model.reconstruct().unwrap());
        assert!(err <= 1e-6, "{method:?}: {err}");
    }
}

#[test]
fn composite_values_match_orthogonal_ground_truth() {
    let grid = DimsGrid::new(vec![vec![3, 3], vec![4, 2]]).unwrap();
    let sigmas = [2.5, 1.25, 0.4, 0.1];
    let (x, _) = random_ktd_tensor(&grid, &sigmas, 3, true).unwrap();
    let model = ktd_decompose(
        &x,
        &grid,
        4,
        DecomposeMethod::Deterministic,
        &SketchConfig::new(4),
    )
    .unwrap();
    for (got, want) in model.sigmas.iter().zip(&sigmas) {
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }
}
