use mfr_core::io::{matrix_to_csv, parse_sparse_csv, read_matrix_csv, sparse_to_csv};
use mfr_core::sensing::{generate_matrix, measure, EnsembleKind, EnsembleSpec};
use mfr_core::signals::{hard_threshold, DenseVector, SparseVector};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

/// A vector together with a threshold level in `1..=len`.
fn vector_and_level() -> impl Strategy<Value = (Vec<f64>, usize)> {
    prop::collection::vec(prop_oneof![Just(0.0), finite()], 1..40).prop_flat_map(|v| {
        let len = v.len();
        (Just(v), 1..=len)
    })
}

proptest! {
    #[test]
    fn hard_threshold_keeps_the_largest((v, tau) in vector_and_level()) {
        let dense = DenseVector::new(v.clone()).unwrap();
        let h = hard_threshold(&dense, tau).unwrap();
        prop_assert!(h.nnz() <= tau);
        let smallest_kept = h.values().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        for (i, &x) in v.iter().enumerate() {
            if h.support().binary_search(&i).is_ok() {
                prop_assert_eq!(h.get(i), x);
            } else {
                prop_assert!(x.abs() <= smallest_kept);
            }
        }
        // no other tau-sparse vector is closer
        let err = h.to_dense().iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let mut mags: Vec<f64> = v.iter().map(|x| x * x).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let best: f64 = mags.iter().skip(tau).sum();
        prop_assert!((err - best).abs() <= 1e-9 * (1.0 + best));
    }

    #[test]
    fn hard_threshold_is_idempotent((v, tau) in vector_and_level()) {
        let once = hard_threshold(&DenseVector::new(v).unwrap(), tau).unwrap();
        let twice = hard_threshold(&once.to_dense(), tau).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn measurement_is_linear(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let phi = generate_matrix(&EnsembleSpec { kind: EnsembleKind::Gaussian, m: 6, n: 10, seed }).unwrap();
        let u = SparseVector::new(10, vec![1, 4], vec![0.5, -2.0]).unwrap();
        let v = SparseVector::new(10, vec![4, 9], vec![1.5, 3.0]).unwrap();
        let combo = SparseVector::new(10, vec![1, 4, 9], vec![a * 0.5, a * -2.0 + b * 1.5, b * 3.0]).unwrap();
        let lhs = measure(&phi, &combo, None).unwrap();
        let mu = measure(&phi, &u, None).unwrap();
        let mv = measure(&phi, &v, None).unwrap();
        for i in 0..6 {
            let rhs = a * mu.as_slice()[i] + b * mv.as_slice()[i];
            prop_assert!((lhs.as_slice()[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn sparse_csv_round_trip(v in prop::collection::vec(prop_oneof![Just(0.0), finite()], 1..30)) {
        let x = SparseVector::from_dense(&DenseVector::new(v).unwrap(), 0.0);
        prop_assert_eq!(parse_sparse_csv(&sparse_to_csv(&x)).unwrap(), x);
    }

    #[test]
    fn matrix_csv_round_trip(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let phi = generate_matrix(&EnsembleSpec { kind: EnsembleKind::Gaussian, m, n, seed }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.csv");
        std::fs::write(&path, matrix_to_csv(&phi)).unwrap();
        prop_assert_eq!(read_matrix_csv(&path).unwrap(), phi);
    }

    #[test]
    fn distance_is_a_metric(a in prop::collection::vec(finite(), 8), b in prop::collection::vec(finite(), 8)) {
        let x = SparseVector::from_dense(&DenseVector::new(a.clone()).unwrap(), 0.0);
        let y = SparseVector::from_dense(&DenseVector::new(b.clone()).unwrap(), 0.0);
        let direct = a.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!((x.distance(&y) - direct).abs() <= 1e-9 * (1.0 + direct));
        prop_assert_eq!(x.distance(&y), y.distance(&x));
        prop_assert_eq!(x.distance(&x), 0.0);
    }
}
