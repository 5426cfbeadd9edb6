//! Restricted isometry constants, the convergence-regime conditions, and a
//! brute-force ℓ0 oracle.
//!
//! `δ_s` is the smallest `δ ≥ 0` with
//! `(1 − δ)‖x‖² ≤ ‖Φx‖² ≤ (1 + δ)‖x‖²` for every `s`-sparse `x`, which is
//! `max_Γ max(1 − σ²min(Φ_Γ), σ²max(Φ_Γ) − 1)` over all supports `|Γ| = s`.

use nalgebra::DVector;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::reconstruct::solve_on_sorted_support;
use crate::sensing::rng;
use crate::signals::{DenseVector, Matrix, SparseVector};

pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    pub order: usize,
    pub delta: f64,
    /// True only when every support of size `order` was examined.
    pub exact: bool,
    pub subsets_examined: u128,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic walk over the `k`-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self { n, current: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// `max(1 − σ²min, σ²max − 1)` for the columns `support` of `Φ`.
fn deviation(phi: &Matrix, support: &[usize]) -> f64 {
    let sub = phi.as_dmatrix().select_columns(support);
    let sv = sub.singular_values();
    let max = sv.max();
    // a submatrix with more columns than rows has a null space
    let min = if support.len() > phi.rows() { 0.0 } else { sv.min() };
    (1.0 - min * min).max(max * max - 1.0).max(0.0)
}

fn check_order(phi: &Matrix, s: usize) -> Result<()> {
    if s == 0 || s > phi.cols() {
        return Err(invalid(format!("RIP order must be in 1..={}, got {s}", phi.cols())));
    }
    Ok(())
}

/// Exact `δ_s` by enumerating all `C(n, s)` supports.
pub fn rip_constant_exact(phi: &Matrix, s: usize, subset_budget: u128) -> Result<RipEstimate> {
    check_order(phi, s)?;
    let needed = binomial(phi.cols(), s);
    if needed > subset_budget {
        return Err(Error::BudgetExceeded { needed, budget: subset_budget });
    }
    let delta = Combinations::new(phi.cols(), s).map(|g| deviation(phi, &g)).fold(0.0, f64::max);
    Ok(RipEstimate { order: s, delta, exact: true, subsets_examined: needed })
}

/// Lower bound on `δ_s` from `trials` uniformly drawn supports.
///
/// When `trials` covers every support the enumeration is done instead and
/// the estimate is reported as exact.
pub fn rip_constant_sampled(phi: &Matrix, s: usize, trials: u64, seed: u64) -> Result<RipEstimate> {
    check_order(phi, s)?;
    if trials == 0 {
        return Err(invalid("sampled RIP estimate needs at least one trial"));
    }
    let total = binomial(phi.cols(), s);
    if trials as u128 >= total {
        return rip_constant_exact(phi, s, total);
    }
    let mut rng = rng(seed);
    let mut delta: f64 = 0.0;
    for _ in 0..trials {
        let mut g = sample(&mut rng, phi.cols(), s).into_vec();
        g.sort_unstable();
        delta = delta.max(deviation(phi, &g));
    }
    Ok(RipEstimate { order: s, delta, exact: false, subsets_examined: trials as u128 })
}

pub fn inv_sqrt_32() -> f64 {
    1.0 / 32f64.sqrt()
}

/// Which of the three sufficient conditions for convergence hold, together
/// with the inputs they were evaluated from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub delta_s_plus_shat: f64,
    pub delta_s_plus_2shat: f64,
    pub delta_2s: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
}

impl RegimeReport {
    pub fn any(&self) -> bool {
        self.condition_a || self.condition_b || self.condition_c
    }

    /// Re-evaluates the inequalities from the stored inputs.
    pub fn verify(&self) -> bool {
        let (a, b, c) =
            evaluate(self.delta_s_plus_shat, self.delta_s_plus_2shat, self.delta_2s, self.gamma, self.alpha);
        a == self.condition_a && b == self.condition_b && c == self.condition_c
    }
}

fn evaluate(d1: f64, d2: f64, d2s: f64, gamma: f64, alpha: f64) -> (bool, bool, bool) {
    let k = inv_sqrt_32();
    let pivot = 1.0 / (d2 - d1 + 1.0);
    let a = gamma >= pivot && gamma * d2 <= k;
    let b = gamma < pivot && gamma * (1.0 - d1) >= 1.0 - k;
    let c = d2s < 1.0 && (1.0 - alpha / 2.0) / (1.0 - d2s) < gamma && gamma < 1.0 / (1.0 - d2s);
    (a, b, c)
}

/// Evaluates conditions (a), (b) and (c).
///
/// `delta_s_plus_shat` and `delta_s_plus_2shat` are `δ_{s+ŝ}` and
/// `δ_{s+2ŝ}`; `delta_2s` enters condition (c) only.
pub fn check_conditions(
    delta_s_plus_shat: f64,
    delta_s_plus_2shat: f64,
    delta_2s: f64,
    gamma: f64,
    alpha: f64,
) -> Result<RegimeReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    for d in [delta_s_plus_shat, delta_s_plus_2shat, delta_2s] {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(invalid(format!("RIP constants must be nonnegative, got {d}")));
        }
    }
    let (condition_a, condition_b, condition_c) =
        evaluate(delta_s_plus_shat, delta_s_plus_2shat, delta_2s, gamma, alpha);
    Ok(RegimeReport {
        delta_s_plus_shat,
        delta_s_plus_2shat,
        delta_2s,
        gamma,
        alpha,
        condition_a,
        condition_b,
        condition_c,
    })
}

/// Open interval of step-lengths satisfying condition (c), if nonempty.
pub fn condition_c_gamma_range(delta_2s: f64, alpha: f64) -> Option<(f64, f64)> {
    if !(0.0..1.0).contains(&delta_2s) || !(alpha > 0.0 && alpha < 1.0) {
        return None;
    }
    Some(((1.0 - alpha / 2.0) / (1.0 - delta_2s), 1.0 / (1.0 - delta_2s)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    /// Sparsest fit, `None` when no support of size `≤ s_max` reaches the tolerance.
    pub solution: Option<SparseVector>,
    pub rank_deficient_skipped: u64,
    pub supports_examined: u128,
}

/// Brute-force sparsest solution of `y ≈ Φx̂`.
///
/// Supports are visited by increasing size and lexicographically within a
/// size, so ties go to the lexicographically smallest support. The residual
/// tolerance defaults to `1e-8·‖y‖₂`.
pub fn l0_oracle(
    phi: &Matrix,
    y: &DenseVector,
    s_max: usize,
    residual_tol: Option<f64>,
    subset_budget: u128,
) -> Result<OracleOutcome> {
    let n = phi.cols();
    if y.len() != phi.rows() {
        return Err(invalid(format!("observation has length {} but the matrix has {} rows", y.len(), phi.rows())));
    }
    if s_max > n {
        return Err(invalid(format!("s_max = {s_max} exceeds the signal dimension {n}")));
    }
    let tol = residual_tol.unwrap_or(1e-8 * y.norm());
    if !(tol >= 0.0) {
        return Err(invalid(format!("residual tolerance must be nonnegative, got {tol}")));
    }
    let needed = (0..=s_max).fold(0u128, |acc, t| acc.saturating_add(binomial(n, t)));
    if needed > subset_budget {
        return Err(Error::BudgetExceeded { needed, budget: subset_budget });
    }

    let yv: &DVector<f64> = y.as_dvector();
    let mut outcome = OracleOutcome { solution: None, rank_deficient_skipped: 0, supports_examined: 0 };
    for t in 0..=s_max {
        for support in Combinations::new(n, t) {
            outcome.supports_examined += 1;
            let values = match solve_on_sorted_support(phi, &support, yv) {
                Ok(v) => v,
                Err(Error::RankDeficient { .. }) => {
                    outcome.rank_deficient_skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let fit = phi.mul_sparse_raw(&support, &values);
            if (yv - fit).norm() <= tol {
                outcome.solution = Some(SparseVector::from_parts_unchecked(n, support, values));
                break;
            }
        }
        if outcome.solution.is_some() {
            break;
        }
    }
    if outcome.rank_deficient_skipped > 0 {
        log::warn!("l0 oracle skipped {} rank-deficient supports", outcome.rank_deficient_skipped);
    }
    Ok(outcome)
}
