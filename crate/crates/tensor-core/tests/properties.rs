//! Property tests for the rearrangement and product identities.

use proptest::prelude::*;
use tensor_core::{index::MultiIndexIter, DenseTensor};

fn small_tensor(max_order: usize, max_extent: usize) -> impl Strategy<Value = DenseTensor> {
    prop::collection::vec(1..=max_extent, 1..=max_order).prop_flat_map(|dims| {
        let len: usize = dims.iter().product();
        prop::collection::vec(-10.0f64..10.0, len)
            .prop_map(move |data| DenseTensor::new(dims.clone(), data).unwrap())
    })
}

fn norm_of(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unfold_fold_identity(t in small_tensor(4, 4), mode_pick in 0usize..4) {
        let mode = mode_pick % t.order();
        let m = t.unfold(mode).unwrap();
        prop_assert!((m.frobenius_norm() - t.frobenius_norm()).abs() <= 1e-12);
        let back = DenseTensor::fold(&m, mode, t.dims()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn vectorize_is_isometric_and_invertible(t in small_tensor(4, 4)) {
        let v = t.vectorize();
        prop_assert!((norm_of(&v) - t.frobenius_norm()).abs() <= 1e-12);
        let back = DenseTensor::from_vec(t.dims().to_vec(), v).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn vectorize_equals_mode0_column_stack(t in small_tensor(4, 3)) {
        let m = t.unfold(0).unwrap();
        let (rows, cols) = (m.dims()[0], m.dims()[1]);
        let mut stacked = Vec::with_capacity(t.len());
        for c in 0..cols {
            for r in 0..rows {
                stacked.push(m.get(&[r, c]));
            }
        }
        prop_assert_eq!(t.vectorize(), stacked);
    }

    #[test]
    fn permute_round_trip_bitwise(t in small_tensor(4, 4), seed in any::<u64>()) {
        // derive a permutation from the seed
        let n = t.order();
        let mut p: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            p.swap(k, (s >> 33) as usize % (k + 1));
        }
        let inv = DenseTensor::inverse_permutation(&p);
        let moved = t.permute_dims(&p).unwrap();
        prop_assert!((moved.frobenius_norm() - t.frobenius_norm()).abs() <= 1e-12);
        prop_assert_eq!(moved.permute_dims(&inv).unwrap(), t);
    }

    #[test]
    fn reshape_preserves_buffer(t in small_tensor(4, 4)) {
        let r = t.reshape(vec![t.len()]).unwrap();
        prop_assert_eq!(r.data(), t.data());
    }

    #[test]
    fn vec_of_outer_is_reversed_kron(a in small_tensor(3, 3), b in small_tensor(3, 3)) {
        // vec(a ∘ b) == kron(vec(b), vec(a)), entry for entry
        let z = a.outer_product(&b);
        let lhs = z.vectorize();
        let rhs = tensor_core::kron_classical(&b.vectorize(), &a.vectorize());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kron_matches_brute_force(x in small_tensor(3, 3), y in small_tensor(3, 3)) {
        let y = y.pad_to_order(x.order().max(y.order())).unwrap();
        let x = x.pad_to_order(y.order()).unwrap();
        prop_assume!(x.len() * y.len() <= 256);
        let z = x.kron(&y).unwrap();
        for jx in MultiIndexIter::new(x.dims()) {
            for jy in MultiIndexIter::new(y.dims()) {
                let merged: Vec<usize> = jx.iter().zip(&jy).zip(y.dims())
                    .map(|((&j, &k), &kn)| k + j * kn)
                    .collect();
                prop_assert_eq!(z.get(&merged), x.get(&jx) * y.get(&jy));
            }
        }
        prop_assert_eq!(z, x.kron_via_rearrange(&y).unwrap());
    }
}
