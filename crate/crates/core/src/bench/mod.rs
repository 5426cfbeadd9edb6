//! Monte-Carlo experiment harness.
//!
//! A sweep is the product of true sparsities, sparsity estimates and
//! (algorithm, step-length) pairs; each combination is a *cell*. Every trial
//! draws one matrix that all cells share, and one signal per true sparsity,
//! so different algorithms in the same trial see identical problems.

mod presets;
mod records;
mod summary;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use presets::{
    convergence_study, figure_preset, gamma_sweep, table_sweep, CONVERGENCE_STUDY_GAMMA, DEFAULT_BENCH_GAMMA,
    TABLE_SWEEP_GAMMA,
};
pub use records::{parse_records_csv, read_records_csv, records_to_csv, write_records_csv, RECORD_COLUMNS};
pub use summary::{pivot_to_csv, summarize, summary_to_csv, write_summary_csv, CellSummary};

use crate::error::{invalid, Result};
use crate::reconstruct::{Algorithm, SingularRange, SolverConfig, StepLength, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sensing::{
    generate_matrix, generate_noise, generate_sparse_signal, measure, mix_seed, EnsembleKind, EnsembleSpec, SignalSpec,
};
use crate::signals::{Matrix, SparseVector};

/// Entries below this magnitude are dropped before the support comparison.
pub const SUCCESS_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchEnsemble {
    Gaussian,
    UnitSphereColumns,
    /// `Φ = I`; needs `m = n`.
    Identity,
}

/// Step-length column of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellGamma {
    Fixed(f64),
    Adaptive,
    /// The frame iteration takes its step from the frame bounds.
    Frame,
}

impl CellGamma {
    fn rank(&self) -> (u8, f64) {
        match *self {
            CellGamma::Fixed(g) => (0, g),
            CellGamma::Adaptive => (1, 0.0),
            CellGamma::Frame => (2, 0.0),
        }
    }
}

impl fmt::Display for CellGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellGamma::Fixed(g) => write!(f, "{g}"),
            CellGamma::Adaptive => f.write_str("adaptive"),
            CellGamma::Frame => f.write_str("frame"),
        }
    }
}

impl FromStr for CellGamma {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "frame" => Ok(CellGamma::Frame),
            other => match other.parse::<StepLength>()? {
                StepLength::Fixed(g) => Ok(CellGamma::Fixed(g)),
                StepLength::Adaptive => Ok(CellGamma::Adaptive),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub ensemble: BenchEnsemble,
    pub n: usize,
    pub m: usize,
    pub s_values: Vec<usize>,
    pub s_hat_values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Fixed values apply to the fixed-step algorithms. `adaptive` paired with
    /// `mfr` runs `mfr_adaptive`.
    pub gamma_values: Vec<StepLength>,
    pub trials: usize,
    pub base_seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub noise_sigma: Option<f64>,
}

impl ExperimentSpec {
    /// Gaussian sweep with the default tolerance and iteration cap.
    pub fn gaussian(n: usize, m: usize, trials: usize, base_seed: u64) -> Self {
        Self {
            ensemble: BenchEnsemble::Gaussian,
            n,
            m,
            s_values: Vec::new(),
            s_hat_values: Vec::new(),
            algorithms: Vec::new(),
            gamma_values: Vec::new(),
            trials,
            base_seed,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            noise_sigma: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(invalid("problem dimensions must be positive"));
        }
        if self.trials == 0 {
            return Err(invalid("at least one trial per cell is required"));
        }
        if self.s_values.is_empty() || self.s_hat_values.is_empty() || self.algorithms.is_empty() {
            return Err(invalid("s, s_hat and algorithm lists must be nonempty"));
        }
        if let Some(&s) = self.s_values.iter().find(|&&s| s == 0 || s > self.n) {
            return Err(invalid(format!("true sparsity {s} outside 1..={}", self.n)));
        }
        if let Some(&s) = self.s_hat_values.iter().find(|&&s| s == 0 || s > self.n) {
            return Err(invalid(format!("sparsity estimate {s} outside 1..={}", self.n)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(invalid("tolerance must be positive and the iteration cap at least 1"));
        }
        if let Some(sigma) = self.noise_sigma {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(invalid(format!("noise sigma must be nonnegative, got {sigma}")));
            }
        }
        if self.ensemble == BenchEnsemble::Identity && self.m != self.n {
            return Err(invalid("the identity ensemble needs m = n"));
        }
        if self.algorithms.contains(&Algorithm::Frame) && self.m < self.n {
            return Err(invalid("the frame iteration needs m >= n"));
        }
        for g in &self.gamma_values {
            if let StepLength::Fixed(v) = g {
                if !(*v > 0.0) || !v.is_finite() {
                    return Err(invalid(format!("step-length must be positive, got {v}")));
                }
            }
        }
        self.algorithm_cells().map(|_| ())
    }

    /// The (algorithm, step-length) pairs, in sweep order, without repeats.
    pub fn algorithm_cells(&self) -> Result<Vec<(Algorithm, CellGamma)>> {
        let mut cells: Vec<(Algorithm, CellGamma)> = Vec::new();
        let mut push = |cell: (Algorithm, CellGamma)| {
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        };
        for &algo in &self.algorithms {
            match algo {
                Algorithm::MfrAdaptive => push((algo, CellGamma::Adaptive)),
                Algorithm::Frame => push((algo, CellGamma::Frame)),
                _ => {
                    if self.gamma_values.is_empty() {
                        return Err(invalid(format!("{algo} needs at least one step-length")));
                    }
                    for &g in &self.gamma_values {
                        match (algo, g) {
                            (_, StepLength::Fixed(v)) => push((algo, CellGamma::Fixed(v))),
                            (Algorithm::Mfr, StepLength::Adaptive) => {
                                push((Algorithm::MfrAdaptive, CellGamma::Adaptive))
                            }
                            (_, StepLength::Adaptive) => {
                                return Err(invalid(format!("{algo} does not support an adaptive step-length")))
                            }
                        }
                    }
                }
            }
        }
        Ok(cells)
    }

    /// All cells in sweep order: true sparsity, estimate, then algorithm cell.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let algos = self.algorithm_cells()?;
        let mut out = Vec::new();
        for &s in &self.s_values {
            for &s_hat in &self.s_hat_values {
                for &(algorithm, gamma) in &algos {
                    out.push(Cell { s, s_hat, algorithm, gamma });
                }
            }
        }
        Ok(out)
    }

    fn matrix(&self, seed: u64) -> Result<Matrix> {
        let kind = match self.ensemble {
            BenchEnsemble::Identity => return Matrix::identity(self.n),
            BenchEnsemble::Gaussian => EnsembleKind::Gaussian,
            BenchEnsemble::UnitSphereColumns => EnsembleKind::UnitSphereColumns,
        };
        generate_matrix(&EnsembleSpec { kind, m: self.m, n: self.n, seed })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub s: usize,
    pub s_hat: usize,
    pub algorithm: Algorithm,
    pub gamma: CellGamma,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub s_hat: usize,
    pub gamma: CellGamma,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub wall_time_s: f64,
}

impl TrialRecord {
    /// Equality ignoring wall time, with NaN residuals treated as equal.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        let residual_eq = self.final_residual == other.final_residual
            || (self.final_residual.is_nan() && other.final_residual.is_nan());
        let strip = |r: &TrialRecord| TrialRecord { final_residual: 0.0, wall_time_s: 0.0, ..r.clone() };
        residual_eq && strip(self) == strip(other)
    }
}

/// Seed of trial `trial` under `base_seed`.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    mix_seed(base_seed, trial as u64)
}

/// The `(Φ, x)` pair of one trial for true sparsity `s`, before noise.
pub fn trial_problem(spec: &ExperimentSpec, trial: usize, s: usize) -> Result<(Matrix, SparseVector)> {
    let seed = trial_seed(spec.base_seed, trial);
    let phi = spec.matrix(mix_seed(seed, 0))?;
    let x = generate_sparse_signal(&SignalSpec::new(spec.n, s, mix_seed(seed, 1 + s as u64)))?;
    Ok((phi, x))
}

/// Runs every cell for one trial. Numerical failures become failed records.
fn run_trial(spec: &ExperimentSpec, cells: &[Cell], trial: usize) -> Vec<(usize, TrialRecord)> {
    let seed = trial_seed(spec.base_seed, trial);
    let phi = spec.matrix(mix_seed(seed, 0));
    let mut spectrum: Option<SingularRange> = None;
    let mut out = Vec::with_capacity(cells.len());
    for (index, cell) in cells.iter().enumerate() {
        let mut record = TrialRecord {
            algorithm: cell.algorithm,
            n: spec.n,
            m: spec.m,
            s: cell.s,
            s_hat: cell.s_hat,
            gamma: cell.gamma,
            trial,
            seed,
            success: false,
            converged: false,
            iterations: 0,
            final_residual: f64::NAN,
            wall_time_s: 0.0,
        };
        let attempt = (|| -> Result<()> {
            let phi = phi.as_ref().map_err(|e| invalid(e.to_string()))?;
            let signal_seed = mix_seed(seed, 1 + cell.s as u64);
            let x = generate_sparse_signal(&SignalSpec::new(spec.n, cell.s, signal_seed))?;
            let noise = match spec.noise_sigma {
                Some(sigma) if sigma > 0.0 => Some(generate_noise(spec.m, sigma, mix_seed(signal_seed, 1))?),
                _ => None,
            };
            let y = measure(phi, &x, noise.as_ref())?;
            let gamma = match cell.gamma {
                CellGamma::Fixed(g) => StepLength::Fixed(g),
                CellGamma::Adaptive => StepLength::Adaptive,
                // unused by the frame iteration
                CellGamma::Frame => StepLength::Fixed(1.0),
            };
            let cfg = SolverConfig::new(cell.s_hat, gamma).with_tol(spec.tol).with_max_iter(spec.max_iter);
            if cell.algorithm.needs_spectrum() && spectrum.is_none() {
                spectrum = Some(SingularRange::of(phi));
            }
            let start = Instant::now();
            let result = cell.algorithm.solve(phi, &y, &cfg, spectrum);
            record.wall_time_s = start.elapsed().as_secs_f64();
            let result = result?;
            record.converged = result.converged;
            record.iterations = result.iterations;
            record.final_residual = result.residual_l2;
            record.success = result.converged && result.x_hat.pruned(SUCCESS_ZERO_TOL).support() == x.support();
            Ok(())
        })();
        if let Err(e) = attempt {
            log::warn!("trial {trial} of {} (s={}, s_hat={}) failed: {e}", cell.algorithm, cell.s, cell.s_hat);
        }
        out.push((index, record));
    }
    out
}

/// Runs the sweep, trials in parallel, and returns records in (cell, trial) order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let cells = spec.cells()?;
    let records: Vec<(usize, TrialRecord)> =
        (0..spec.trials).into_par_iter().flat_map_iter(|t| run_trial(spec, &cells, t)).collect();
    Ok(in_cell_order(records))
}

/// Serial reference implementation of [`run_experiment`].
pub fn run_experiment_serial(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let cells = spec.cells()?;
    let records: Vec<(usize, TrialRecord)> = (0..spec.trials).flat_map(|t| run_trial(spec, &cells, t)).collect();
    Ok(in_cell_order(records))
}

fn in_cell_order(mut records: Vec<(usize, TrialRecord)>) -> Vec<TrialRecord> {
    records.sort_by_key(|(cell, r)| (*cell, r.trial));
    records.into_iter().map(|(_, r)| r).collect()
}

pub(crate) fn cmp_gamma(a: &CellGamma, b: &CellGamma) -> Ordering {
    let (ra, va) = a.rank();
    let (rb, vb) = b.rank();
    ra.cmp(&rb).then(va.total_cmp(&vb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::gaussian(40, 20, 6, 9);
        spec.s_values = vec![2, 3];
        spec.s_hat_values = vec![2, 4];
        spec.algorithms = vec![Algorithm::Mfr, Algorithm::MfrLs, Algorithm::MfrAccel];
        spec.gamma_values = vec![StepLength::Fixed(0.6)];
        spec
    }

    #[test]
    fn identity_spec_always_succeeds_in_one_iteration() {
        let mut spec = ExperimentSpec::gaussian(12, 12, 10, 4);
        spec.ensemble = BenchEnsemble::Identity;
        spec.s_values = vec![3];
        spec.s_hat_values = vec![3];
        spec.algorithms = vec![Algorithm::Mfr];
        spec.gamma_values = vec![StepLength::Fixed(1.0)];
        let records = run_experiment(&spec).unwrap();
        assert_eq!(records.len(), 10);
        assert!(records.iter().all(|r| r.success && r.iterations == 1));
    }

    #[test]
    fn records_are_ordered_and_complete() {
        let spec = small_spec();
        let records = run_experiment(&spec).unwrap();
        let cells = spec.cells().unwrap();
        assert_eq!(records.len(), cells.len() * spec.trials);
        for (i, r) in records.iter().enumerate() {
            let c = cells[i / spec.trials];
            assert_eq!((r.s, r.s_hat, r.algorithm, r.gamma), (c.s, c.s_hat, c.algorithm, c.gamma));
            assert_eq!(r.trial, i % spec.trials);
            assert!(!r.success || r.converged);
        }
    }

    #[test]
    fn underestimated_sparsity_never_succeeds() {
        let mut spec = small_spec();
        spec.s_values = vec![4];
        spec.s_hat_values = vec![2, 3];
        assert!(run_experiment(&spec).unwrap().iter().all(|r| !r.success));
    }

    #[test]
    fn parallel_and_serial_agree() {
        let spec = small_spec();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment_serial(&spec).unwrap();
        let c = run_experiment(&spec).unwrap();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.same_outcome(y)));
        assert!(a.iter().zip(&c).all(|(x, y)| x.same_outcome(y)));
    }

    #[test]
    fn algorithms_share_the_problem_within_a_trial() {
        let spec = small_spec();
        let records = run_experiment(&spec).unwrap();
        for t in 0..spec.trials {
            let seeds: Vec<u64> = records.iter().filter(|r| r.trial == t).map(|r| r.seed).collect();
            assert!(seeds.windows(2).all(|w| w[0] == w[1]));
        }
        let (phi_a, x_a) = trial_problem(&spec, 2, 3).unwrap();
        let (phi_b, x_b) = trial_problem(&spec, 2, 3).unwrap();
        assert_eq!(phi_a, phi_b);
        assert_eq!(x_a, x_b);
    }

    #[test]
    fn algorithm_cell_expansion() {
        let mut spec = small_spec();
        spec.algorithms = vec![Algorithm::Mfr, Algorithm::MfrAdaptive, Algorithm::Frame];
        spec.gamma_values = vec![StepLength::Fixed(0.5), StepLength::Adaptive];
        spec.m = 40;
        assert_eq!(
            spec.algorithm_cells().unwrap(),
            vec![
                (Algorithm::Mfr, CellGamma::Fixed(0.5)),
                (Algorithm::MfrAdaptive, CellGamma::Adaptive),
                (Algorithm::Frame, CellGamma::Frame),
            ]
        );
        spec.algorithms = vec![Algorithm::MfrLs];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small_spec();
        spec.trials = 0;
        assert!(run_experiment(&spec).is_err());
        let mut spec = small_spec();
        spec.s_hat_values = vec![41];
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.algorithms.push(Algorithm::Frame);
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.ensemble = BenchEnsemble::Identity;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn failed_trials_are_recorded() {
        // a huge step diverges; the sweep still produces every record
        let mut spec = small_spec();
        spec.gamma_values = vec![StepLength::Fixed(1e6)];
        spec.algorithms = vec![Algorithm::Mfr];
        let records = run_experiment(&spec).unwrap();
        assert_eq!(records.len(), 4 * spec.trials);
        assert!(records.iter().all(|r| !r.success));
    }

    #[test]
    fn cell_gamma_text() {
        for g in [CellGamma::Fixed(0.65), CellGamma::Adaptive, CellGamma::Frame] {
            assert_eq!(g.to_string().parse::<CellGamma>().unwrap(), g);
        }
    }
}
