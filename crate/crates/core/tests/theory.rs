//! Checks of the iteration against independent reference computations, and
//! an instance on which the sufficient conditions do not give the promised
//! error decay.

use mfr_core::reconstruct::{mfr, mfr_accelerated, mfr_least_squares, SolverConfig};
use mfr_core::rip::{check_conditions, condition_c_gamma_range, rip_constant_exact, DEFAULT_SUBSET_BUDGET};
use mfr_core::sensing::{
    generate_matrix, generate_sparse_signal, measure, mix_seed, EnsembleKind, EnsembleSpec, SignalSpec,
};
use mfr_core::signals::{hard_threshold, DenseVector, Matrix, SparseVector};

fn gaussian(m: usize, n: usize, seed: u64) -> Matrix {
    generate_matrix(&EnsembleSpec { kind: EnsembleKind::Gaussian, m, n, seed }).unwrap()
}

/// Plain iterative hard thresholding, `x ← H_s(x + Aᵀ(b − Ax))`, from zero.
fn iht_iterates(a: &Matrix, b: &DenseVector, s: usize, count: usize) -> Vec<SparseVector> {
    let (am, bv) = (a.as_dmatrix(), b.as_dvector());
    let mut x = nalgebra::DVector::zeros(a.cols());
    let mut out = Vec::new();
    for _ in 0..count {
        let step = &x + am.transpose() * (bv - am * &x);
        let h = hard_threshold(&DenseVector::new(step.iter().copied().collect()).unwrap(), s).unwrap();
        x = h.to_dense().as_dvector().clone();
        out.push(h);
    }
    out
}

#[test]
fn mfr_is_iht_on_a_rescaled_problem() {
    // γΦᵀ(y − Φx) = (√γΦ)ᵀ(√γy − √γΦx), so MFR with step γ is IHT on the
    // problem scaled by √γ
    for seed in 0..5 {
        let (m, n, s) = (40, 100, 5);
        let phi = gaussian(m, n, mix_seed(1, seed));
        let x = generate_sparse_signal(&SignalSpec::new(n, s, mix_seed(2, seed))).unwrap();
        let y = measure(&phi, &x, None).unwrap();
        let gamma = 0.3 + 0.1 * seed as f64;
        let res = mfr(&phi, &y, &SolverConfig::fixed(s, gamma).recording()).unwrap();
        let iterates = res.iterates.unwrap();

        let root = gamma.sqrt();
        let scaled_y = DenseVector::new(y.iter().map(|v| v * root).collect()).unwrap();
        let reference = iht_iterates(&phi.scaled(root).unwrap(), &scaled_y, s, iterates.len());
        for (k, (a, b)) in iterates.iter().zip(&reference).enumerate() {
            assert_eq!(a.support(), b.support(), "seed {seed}, iterate {k}");
            assert!(a.distance(b) <= 1e-10 * (1.0 + b.norm()), "seed {seed}, iterate {k}");
        }
    }
}

#[test]
fn acceleration_is_inert_for_orthonormal_columns() {
    // with orthonormal columns μ = 0, every Chebyshev weight is 1 and the
    // accelerated recurrence collapses to the plain one
    let q = gaussian(30, 8, 3).as_dmatrix().clone().qr().q();
    let phi = Matrix::from_dmatrix(q).unwrap();
    let x = generate_sparse_signal(&SignalSpec::new(8, 3, 4)).unwrap();
    let y = measure(&phi, &x, None).unwrap();
    let cfg = SolverConfig::fixed(3, 0.7).recording();
    let plain = mfr(&phi, &y, &cfg).unwrap();
    let fast = mfr_accelerated(&phi, &y, &cfg).unwrap();
    assert_eq!(plain.iterations, fast.iterations);
    for (a, b) in plain.iterates.unwrap().iter().zip(fast.iterates.unwrap().iter()) {
        assert!(a.distance(b) <= 1e-12);
    }
}

#[test]
fn least_squares_finishes_once_the_support_is_found() {
    let (m, n, s) = (60, 200, 6);
    let phi = gaussian(m, n, 11);
    let x = generate_sparse_signal(&SignalSpec::new(n, s, 12)).unwrap();
    let y = measure(&phi, &x, None).unwrap();
    let res = mfr_least_squares(&phi, &y, &SolverConfig::fixed(s, 0.65)).unwrap();
    assert!(res.converged);
    assert_eq!(res.x_hat.support(), x.support());
    assert!(res.x_hat.distance(&x) <= 1e-10);
    assert!(res.iterations <= 5, "{} iterations", res.iterations);
    assert!(!res.ls_steps.is_empty());
}

#[test]
fn condition_c_does_not_imply_halving_on_wide_matrices() {
    // Unit-norm columns, s = ŝ = 1. The first iterate is γ x_j e_j, so its
    // error is |1 − γ|·|x_j|. Condition (c) needs γ > 0.75/(1 − δ₂), and for
    // δ₂ > 1/3 that makes the error larger than ‖x‖/2.
    let found = (0..200u64)
        .map(|seed| {
            let spec = EnsembleSpec { kind: EnsembleKind::UnitSphereColumns, m: 8, n: 16, seed };
            let phi = generate_matrix(&spec).unwrap();
            let d2 = rip_constant_exact(&phi, 2, DEFAULT_SUBSET_BUDGET).unwrap().delta;
            (phi, d2)
        })
        .find(|(_, d2)| *d2 > 1.0 / 3.0 && condition_c_gamma_range(*d2, 0.5).is_some());
    let (phi, d2) = found.expect("a wide instance with a non-empty condition (c) range");
    let (lo, hi) = condition_c_gamma_range(d2, 0.5).unwrap();
    let gamma = (lo + hi) / 2.0;
    let d3 = rip_constant_exact(&phi, 3, DEFAULT_SUBSET_BUDGET).unwrap().delta;
    assert!(check_conditions(d2, d3, d2, gamma, 0.5).unwrap().condition_c);

    let x = SparseVector::new(16, vec![5], vec![1.0]).unwrap();
    let y = measure(&phi, &x, None).unwrap();
    let res = mfr(&phi, &y, &SolverConfig::fixed(1, gamma).with_max_iter(3).recording()).unwrap();
    let first = &res.iterates.unwrap()[0];
    assert_eq!(first.support(), &[5]);
    let err = first.distance(&x);
    assert!((err - (gamma - 1.0).abs()).abs() < 1e-12);
    assert!(err > 0.5 * x.norm(), "error {err} with gamma {gamma}, delta_2 {d2}");
}
