use nalgebra::DVector;

use super::engine::{residual_of, Trace};
use super::{GammaSearch, SolveResult, SolverConfig, StepLength, StopReason};
use crate::error::{invalid, Result};
use crate::signals::{top_support, DenseVector, Matrix, SparseVector};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Residual of the thresholded update `H_ŝ(x + γg)` as a function of `γ`.
struct LineObjective<'a> {
    phi: &'a Matrix,
    y: &'a DVector<f64>,
    x: &'a [f64],
    g: &'a [f64],
    s_hat: usize,
}

struct Candidate {
    gamma: f64,
    residual: DVector<f64>,
    norm: f64,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl LineObjective<'_> {
    fn eval(&self, gamma: f64) -> Candidate {
        let a: Vec<f64> = self.x.iter().zip(self.g).map(|(xi, gi)| xi + gamma * gi).collect();
        let support = top_support(&a, self.s_hat);
        let values: Vec<f64> = support.iter().map(|&i| a[i]).collect();
        let residual = residual_of(self.phi, self.y, &support, &values);
        let norm = residual.norm();
        // non-finite candidates never win a comparison
        let norm = if norm.is_finite() && values.iter().all(|v| v.is_finite()) { norm } else { f64::INFINITY };
        Candidate { gamma, residual, norm, support, values }
    }

    /// Minimiser over γ of `‖y − Φ(x + γg)_Γ‖₂` with the support `Γ` frozen.
    fn line_minimiser(&self, support: &[usize]) -> Option<f64> {
        let xs: Vec<f64> = support.iter().map(|&i| self.x[i]).collect();
        let gs: Vec<f64> = support.iter().map(|&i| self.g[i]).collect();
        let base = residual_of(self.phi, self.y, support, &xs);
        let dir = self.phi.mul_sparse_raw(support, &gs);
        let denom = dir.norm_squared();
        if denom == 0.0 {
            return None;
        }
        let gamma = base.dot(&dir) / denom;
        (gamma.is_finite() && gamma > 0.0).then_some(gamma)
    }

    /// Grid scan, golden-section refinement on the best bracket, then the
    /// frozen-support line minimiser. Returns the best candidate seen.
    fn search(&self, scheme: &GammaSearch) -> Candidate {
        let n = scheme.grid_points;
        let step = (scheme.upper - scheme.lower) / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|i| scheme.lower + step * i as f64).collect();
        let mut best = self.eval(grid[0]);
        let mut best_idx = 0;
        for (i, &gamma) in grid.iter().enumerate().skip(1) {
            let c = self.eval(gamma);
            if c.norm < best.norm {
                best = c;
                best_idx = i;
            }
        }

        let mut lo = grid[best_idx.saturating_sub(1)];
        let mut hi = grid[(best_idx + 1).min(n - 1)];
        let mut c1 = hi - INV_PHI * (hi - lo);
        let mut c2 = lo + INV_PHI * (hi - lo);
        let mut f1 = self.eval(c1);
        let mut f2 = self.eval(c2);
        for _ in 0..scheme.refine_steps {
            if f1.norm <= f2.norm {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - INV_PHI * (hi - lo);
                f1 = self.eval(c1);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + INV_PHI * (hi - lo);
                f2 = self.eval(c2);
            }
        }
        for c in [f1, f2] {
            if c.norm < best.norm {
                best = c;
            }
        }

        if let Some(gamma) = self.line_minimiser(&best.support) {
            let c = self.eval(gamma);
            if c.norm < best.norm {
                best = c;
            }
        }
        best
    }
}

/// MFR with the step-length re-chosen every iteration to minimise
/// `‖y − Φ H_ŝ(x⁽ᵏ⁾ + γ Φᵀ(y − Φx⁽ᵏ⁾))‖₂`.
///
/// A step is only taken when it strictly lowers the residual; otherwise
/// `γ = 0` is used, which leaves the iterate unchanged and ends the run.
/// The residual trace is therefore non-increasing.
pub fn mfr_adaptive(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate(phi, y)?;
    if cfg.gamma != StepLength::Adaptive {
        return Err(invalid("mfr_adaptive needs an adaptive step-length"));
    }
    if cfg.accelerate || cfg.least_squares {
        return Err(invalid("the adaptive step-length is not combined with acceleration or least squares"));
    }
    let n = phi.cols();
    let yv = y.as_dvector();

    let mut x = SparseVector::zero(n)?;
    let mut r = yv.clone();
    let mut r_norm = r.norm();
    let mut trace = Trace::new(cfg.record_iterates);
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    for pass in 0..=cfg.max_iter {
        let g: Vec<f64> = phi.as_dmatrix().tr_mul(&r).iter().copied().collect();
        let xd = x.to_dense_vec();
        let objective = LineObjective { phi, y: yv, x: &xd, g: &g, s_hat: cfg.s_hat };
        let best = objective.search(&cfg.search);

        // γ = 0 reproduces x, whose residual norm is r_norm
        let (next, r_next, norm, gamma) = if best.norm < r_norm {
            let next = SparseVector::from_parts_unchecked(n, best.support, best.values);
            (next, best.residual, best.norm, best.gamma)
        } else {
            (x.clone(), r.clone(), r_norm, 0.0)
        };
        let delta = next.distance(&x);
        trace.push(&next, norm, delta, gamma, false);
        x = next;
        r = r_next;
        r_norm = norm;

        if pass > 0 {
            iterations = pass;
            if delta < cfg.tol {
                stop = StopReason::Converged;
                break;
            }
        }
    }
    Ok(trace.finish(x, iterations, stop, 0))
}
