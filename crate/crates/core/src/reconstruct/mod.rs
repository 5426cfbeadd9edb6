//! Modified frame reconstruction (MFR) solvers.
//!
//! Every solver starts from `x⁽⁰⁾ = 0` and repeats an update
//! `a = x + γ Φᵀ(y − Φx)` followed by hard thresholding to `ŝ` terms, until
//! successive iterates differ by less than `tol` in ℓ2. The variants differ
//! in how the update is formed:
//!
//! * [`mfr`]: the plain iteration with a fixed step-length.
//! * [`mfr_accelerated`]: a two-term Chebyshev (or fixed Richardson) recurrence.
//! * [`mfr_least_squares`]: whenever the kept support changes, the iterate is
//!   replaced by the least-squares fit on that support.
//! * [`mfr_adaptive`]: the step-length is re-chosen every iteration to minimise
//!   the measurement residual.
//!
//! [`frame_reconstruct`] is the classical (unthresholded) frame iteration.
//!
//! # Iteration count
//!
//! The first update, from `x⁽⁰⁾ = 0` to `x⁽¹⁾`, is the initialisation step.
//! `iterations` counts the loop passes after it, each producing one more
//! iterate and one stopping test. Trace entry `i` describes iterate
//! `x⁽ⁱ⁺¹⁾`, so every trace holds `iterations + 1` entries.

mod adaptive;
mod engine;
mod frame;
mod least_squares;
mod omega;
mod report;
mod spectrum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use adaptive::mfr_adaptive;
pub use engine::{mfr, mfr_accelerated, mfr_accelerated_with_spectrum, mfr_least_squares};
pub use frame::{frame_reconstruct, FrameBounds, FrameConfig};
pub use least_squares::least_squares_on_support;
pub(crate) use least_squares::solve_on_sorted_support;
pub use omega::{chebyshev_omega, chebyshev_sequence, richardson_omega};
pub use report::{SolveReport, SparseReport};
pub use spectrum::{SingularRange, DENSE_SVD_COLUMN_LIMIT};

use crate::error::{invalid, Result};
use crate::signals::{DenseVector, Matrix, SparseVector};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Step-length: a fixed `γ > 0` or chosen per iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepLength {
    Fixed(f64),
    Adaptive,
}

impl StepLength {
    pub fn fixed(self) -> Option<f64> {
        match self {
            StepLength::Fixed(g) => Some(g),
            StepLength::Adaptive => None,
        }
    }
}

impl fmt::Display for StepLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLength::Fixed(g) => write!(f, "{g}"),
            StepLength::Adaptive => f.write_str("adaptive"),
        }
    }
}

impl FromStr for StepLength {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(StepLength::Adaptive);
        }
        let g: f64 =
            s.parse().map_err(|_| invalid(format!("step-length must be a number or `adaptive`, got {s:?}")))?;
        if !(g > 0.0) || !g.is_finite() {
            return Err(invalid(format!("step-length must be positive and finite, got {g}")));
        }
        Ok(StepLength::Fixed(g))
    }
}

impl Serialize for StepLength {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StepLength::Fixed(g) => ser.serialize_f64(*g),
            StepLength::Adaptive => ser.serialize_str("adaptive"),
        }
    }
}

impl<'de> Deserialize<'de> for StepLength {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(g) => Ok(StepLength::Fixed(g)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Search scheme for the adaptive step-length: a uniform grid over
/// `[lower, upper]`, golden-section refinement around the best grid point,
/// then the exact line minimiser on the winning support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSearch {
    pub lower: f64,
    pub upper: f64,
    pub grid_points: usize,
    pub refine_steps: usize,
}

impl Default for GammaSearch {
    fn default() -> Self {
        Self { lower: 0.05, upper: 2.0, grid_points: 64, refine_steps: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Sparsity estimate ŝ: the number of terms kept by each threshold.
    pub s_hat: usize,
    pub gamma: StepLength,
    pub tol: f64,
    pub max_iter: usize,
    pub accelerate: bool,
    pub least_squares: bool,
    /// Use the limiting Richardson weight instead of the Chebyshev sequence.
    pub richardson_fixed_omega: bool,
    #[serde(default)]
    pub search: GammaSearch,
    /// Keep every iterate in [`SolveResult::iterates`].
    #[serde(default)]
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(s_hat: usize, gamma: StepLength) -> Self {
        Self {
            s_hat,
            gamma,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            accelerate: false,
            least_squares: false,
            richardson_fixed_omega: false,
            search: GammaSearch::default(),
            record_iterates: false,
        }
    }

    pub fn fixed(s_hat: usize, gamma: f64) -> Self {
        Self::new(s_hat, StepLength::Fixed(gamma))
    }

    pub fn adaptive(s_hat: usize) -> Self {
        Self::new(s_hat, StepLength::Adaptive)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub(crate) fn validate(&self, phi: &Matrix, y: &DenseVector) -> Result<()> {
        if y.len() != phi.rows() {
            return Err(invalid(format!("observation has length {} but the matrix has {} rows", y.len(), phi.rows())));
        }
        if self.s_hat == 0 || self.s_hat > phi.cols() {
            return Err(invalid(format!("sparsity estimate must lie in 1..={}, got {}", phi.cols(), self.s_hat)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("iteration cap must be at least 1"));
        }
        if let StepLength::Fixed(g) = self.gamma {
            if !(g > 0.0) || !g.is_finite() {
                return Err(invalid(format!("step-length must be positive, got {g}")));
            }
        }
        let s = &self.search;
        if !(s.lower >= 0.0 && s.upper > s.lower && s.upper.is_finite()) || s.grid_points < 2 {
            return Err(invalid("adaptive search needs 0 <= lower < upper and at least 2 grid points"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Successive iterates differed by less than the tolerance.
    Converged,
    MaxIterations,
    /// The update produced a non-finite value; the last finite iterate is kept.
    Diverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x_hat: SparseVector,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub residual_l2: f64,
    /// `‖y − Φx⁽ᵏ⁾‖₂` for each iterate.
    pub residual_trace: Vec<f64>,
    /// `‖x⁽ᵏ⁾ − x⁽ᵏ⁻¹⁾‖₂` for each iterate.
    pub iterate_delta_trace: Vec<f64>,
    /// Step-length used to produce each iterate.
    pub gamma_trace: Vec<f64>,
    /// Trace positions whose iterate is a least-squares fit.
    pub ls_steps: Vec<usize>,
    /// Least-squares replacements skipped because `Φ_Γ` was rank deficient.
    pub rank_deficient_fallbacks: usize,
    pub iterates: Option<Vec<SparseVector>>,
}

/// The solver variants exposed by the benchmark and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Mfr,
    MfrAccel,
    MfrLs,
    MfrLsAccel,
    MfrAdaptive,
    Frame,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Mfr,
        Algorithm::MfrAccel,
        Algorithm::MfrLs,
        Algorithm::MfrLsAccel,
        Algorithm::MfrAdaptive,
        Algorithm::Frame,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mfr => "mfr",
            Algorithm::MfrAccel => "mfr_accel",
            Algorithm::MfrLs => "mfr_ls",
            Algorithm::MfrLsAccel => "mfr_ls_accel",
            Algorithm::MfrAdaptive => "mfr_adaptive",
            Algorithm::Frame => "frame",
        }
    }

    pub fn uses_fixed_gamma(self) -> bool {
        !matches!(self, Algorithm::MfrAdaptive | Algorithm::Frame)
    }

    pub fn needs_spectrum(self) -> bool {
        matches!(self, Algorithm::MfrAccel | Algorithm::MfrLsAccel)
    }

    /// Runs this variant. `spectrum` lets callers reuse the extreme singular
    /// values of `phi` across solves; it is computed when absent and needed.
    pub fn solve(
        self,
        phi: &Matrix,
        y: &DenseVector,
        cfg: &SolverConfig,
        spectrum: Option<SingularRange>,
    ) -> Result<SolveResult> {
        let mut cfg = cfg.clone();
        match self {
            Algorithm::Mfr => mfr(phi, y, &cfg),
            Algorithm::MfrLs => mfr_least_squares(phi, y, &cfg),
            Algorithm::MfrAccel | Algorithm::MfrLsAccel => {
                cfg.least_squares = self == Algorithm::MfrLsAccel;
                let spectrum = spectrum.unwrap_or_else(|| SingularRange::of(phi));
                mfr_accelerated_with_spectrum(phi, y, &cfg, spectrum)
            }
            Algorithm::MfrAdaptive => {
                cfg.gamma = StepLength::Adaptive;
                cfg.accelerate = false;
                cfg.least_squares = false;
                mfr_adaptive(phi, y, &cfg)
            }
            Algorithm::Frame => {
                let frame_cfg = FrameConfig {
                    bounds: None,
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    record_iterates: cfg.record_iterates,
                };
                frame_reconstruct(phi, y, &frame_cfg)
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            invalid(format!("unknown algorithm {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Dispatches on the configuration flags alone: an adaptive step-length
/// selects [`mfr_adaptive`], otherwise acceleration and least squares pick
/// the fixed-step variant.
pub fn solve(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig) -> Result<SolveResult> {
    match (cfg.gamma, cfg.accelerate, cfg.least_squares) {
        (StepLength::Adaptive, _, _) => mfr_adaptive(phi, y, cfg),
        (_, true, _) => mfr_accelerated(phi, y, cfg),
        (_, false, true) => mfr_least_squares(phi, y, cfg),
        (_, false, false) => mfr(phi, y, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_length_parsing() {
        assert_eq!("0.5".parse::<StepLength>().unwrap(), StepLength::Fixed(0.5));
        assert_eq!("Adaptive".parse::<StepLength>().unwrap(), StepLength::Adaptive);
        assert!("-1".parse::<StepLength>().is_err());
        assert!("fast".parse::<StepLength>().is_err());
        let json = serde_json::to_string(&[StepLength::Fixed(0.25), StepLength::Adaptive]).unwrap();
        assert_eq!(json, r#"[0.25,"adaptive"]"#);
        let back: Vec<StepLength> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![StepLength::Fixed(0.25), StepLength::Adaptive]);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("cosamp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let phi = Matrix::identity(3).unwrap();
        let y = DenseVector::zeros(3).unwrap();
        assert!(SolverConfig::fixed(0, 1.0).validate(&phi, &y).is_err());
        assert!(SolverConfig::fixed(4, 1.0).validate(&phi, &y).is_err());
        assert!(SolverConfig::fixed(1, 0.0).validate(&phi, &y).is_err());
        assert!(SolverConfig::fixed(1, 1.0).with_tol(0.0).validate(&phi, &y).is_err());
        assert!(SolverConfig::fixed(1, 1.0).with_max_iter(0).validate(&phi, &y).is_err());
        assert!(SolverConfig::fixed(1, 1.0).validate(&phi, &DenseVector::zeros(2).unwrap()).is_err());
        assert!(SolverConfig::fixed(3, 1.0).validate(&phi, &y).is_ok());
    }
}
