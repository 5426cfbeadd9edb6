//! Ready-made sweeps for the standard experiments.

use super::ExperimentSpec;
use crate::reconstruct::{Algorithm, StepLength};

/// Step-length used by the presets when none is given.
pub const DEFAULT_BENCH_GAMMA: f64 = 0.65;

/// Step-length for the 50×400 sparsity-estimate sweep. Calibrated so the
/// ŝ = s = 4 cell succeeds about a quarter of the time; larger steps make
/// every cell of that sweep more successful.
pub const TABLE_SWEEP_GAMMA: f64 = 0.12;

/// Step-length for the iteration-count comparison. The Chebyshev weights are
/// set by the spectrum of the whole matrix, so the accelerated variant runs
/// at an almost fixed rate (about 45 iterations at 200×400) whatever `γ` is,
/// while plain MFR speeds up as `γ` grows and overtakes it near `γ ≈ 0.45`.
pub const CONVERGENCE_STUDY_GAMMA: f64 = 0.3;

/// 50×400 Gaussian sparsity-estimate sweep with least-squares MFR.
pub fn table_sweep(trials: usize, base_seed: u64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::gaussian(400, 50, trials, base_seed);
    spec.s_values = vec![4, 8, 12, 16];
    spec.s_hat_values = vec![4, 8, 12, 16, 20, 30, 40];
    spec.algorithms = vec![Algorithm::MfrLs];
    spec.gamma_values = vec![StepLength::Fixed(TABLE_SWEEP_GAMMA)];
    spec
}

/// Iteration counts of the fixed-step variants on shared problems.
pub fn convergence_study(n: usize, m: usize, s: usize, trials: usize, base_seed: u64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::gaussian(n, m, trials, base_seed);
    spec.s_values = vec![s];
    spec.s_hat_values = vec![s];
    spec.algorithms = vec![Algorithm::Mfr, Algorithm::MfrAccel, Algorithm::MfrLs, Algorithm::MfrLsAccel];
    spec.gamma_values = vec![StepLength::Fixed(CONVERGENCE_STUDY_GAMMA)];
    spec
}

/// Plain MFR over the step-lengths `0.05, 0.10, …, 0.70`.
pub fn gamma_sweep(n: usize, m: usize, s: usize, trials: usize, base_seed: u64) -> ExperimentSpec {
    let mut spec = ExperimentSpec::gaussian(n, m, trials, base_seed);
    spec.s_values = vec![s];
    spec.s_hat_values = vec![s];
    spec.algorithms = vec![Algorithm::Mfr];
    spec.gamma_values = (1..=14).map(|k| StepLength::Fixed(0.05 * k as f64)).collect();
    spec
}

/// Success rate against true sparsity at a large size (the standard figures
/// use `n = 400` and `n = 800` with 1000 trials). One spec per true sparsity,
/// each with `ŝ = s`, for every fixed-step variant and the adaptive one.
pub fn figure_preset(n: usize, m: usize, trials: usize, base_seed: u64) -> Vec<ExperimentSpec> {
    let step = (m / 20).max(1);
    (step..=m / 2)
        .step_by(step)
        .map(|s| {
            let mut spec = ExperimentSpec::gaussian(n, m, trials, base_seed);
            spec.s_values = vec![s];
            spec.s_hat_values = vec![s];
            spec.algorithms = vec![
                Algorithm::Mfr,
                Algorithm::MfrAccel,
                Algorithm::MfrLs,
                Algorithm::MfrLsAccel,
                Algorithm::MfrAdaptive,
            ];
            spec.gamma_values = vec![StepLength::Fixed(DEFAULT_BENCH_GAMMA)];
            spec
        })
        .collect()
}
