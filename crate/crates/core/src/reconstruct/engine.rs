use nalgebra::DVector;

use super::least_squares::solve_on_sorted_support;
use super::omega::{chebyshev_omega, richardson_omega};
use super::spectrum::SingularRange;
use super::{SolveResult, SolverConfig, StopReason};
use crate::error::{invalid, Error, Result};
use crate::signals::{top_support, DenseVector, Matrix, SparseVector};

/// Per-iterate bookkeeping shared by all solvers.
pub(crate) struct Trace {
    pub residual: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub ls_steps: Vec<usize>,
    pub iterates: Option<Vec<SparseVector>>,
}

impl Trace {
    pub fn new(record_iterates: bool) -> Self {
        Self {
            residual: Vec::new(),
            delta: Vec::new(),
            gamma: Vec::new(),
            ls_steps: Vec::new(),
            iterates: record_iterates.then(Vec::new),
        }
    }

    pub fn push(&mut self, x: &SparseVector, residual: f64, delta: f64, gamma: f64, least_squares: bool) {
        if least_squares {
            self.ls_steps.push(self.residual.len());
        }
        self.residual.push(residual);
        self.delta.push(delta);
        self.gamma.push(gamma);
        if let Some(it) = self.iterates.as_mut() {
            it.push(x.clone());
        }
    }

    pub fn finish(
        self,
        x_hat: SparseVector,
        iterations: usize,
        stop_reason: StopReason,
        rank_deficient_fallbacks: usize,
    ) -> SolveResult {
        let residual_l2 = self.residual.last().copied().unwrap_or(f64::NAN);
        SolveResult {
            x_hat,
            iterations,
            converged: stop_reason == StopReason::Converged,
            stop_reason,
            residual_l2,
            residual_trace: self.residual,
            iterate_delta_trace: self.delta,
            gamma_trace: self.gamma,
            ls_steps: self.ls_steps,
            rank_deficient_fallbacks,
            iterates: self.iterates,
        }
    }
}

/// `y − Φ_Γ z`.
pub(crate) fn residual_of(phi: &Matrix, y: &DVector<f64>, support: &[usize], values: &[f64]) -> DVector<f64> {
    y - phi.mul_sparse_raw(support, values)
}

#[derive(Clone, Copy)]
enum Weights {
    Chebyshev { mu: f64 },
    Richardson { omega: f64 },
}

struct Variant {
    weights: Option<Weights>,
    least_squares: bool,
}

/// Plain MFR: `x⁽ᵏ⁺¹⁾ = H_ŝ[x⁽ᵏ⁾ + γ Φᵀ(y − Φx⁽ᵏ⁾)]`.
///
/// The acceleration and least-squares flags of `cfg` are ignored.
pub fn mfr(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig) -> Result<SolveResult> {
    run(phi, y, cfg, Variant { weights: None, least_squares: false })
}

/// MFR with a least-squares refit whenever the thresholded support changes.
/// Combined with acceleration when `cfg.accelerate` is set.
pub fn mfr_least_squares(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig) -> Result<SolveResult> {
    if cfg.accelerate {
        let mut cfg = cfg.clone();
        cfg.least_squares = true;
        return mfr_accelerated(phi, y, &cfg);
    }
    run(phi, y, cfg, Variant { weights: None, least_squares: true })
}

/// MFR with polynomial acceleration:
/// `x⁽ᵏ⁺¹⁾ = H_ŝ[x⁽ᵏ⁻¹⁾ + ω⁽ᵏ⁺¹⁾(γ Φᵀ(y − Φx⁽ᵏ⁾) + x⁽ᵏ⁾ − x⁽ᵏ⁻¹⁾)]`.
///
/// `μ` is built from the extreme singular values of `phi`. With
/// `cfg.least_squares` set, the recurrence restarts (`ω = 1`, previous
/// iterate = current) after every least-squares refit.
pub fn mfr_accelerated(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate(phi, y)?;
    mfr_accelerated_with_spectrum(phi, y, cfg, SingularRange::of(phi))
}

/// [`mfr_accelerated`] with precomputed extreme singular values.
pub fn mfr_accelerated_with_spectrum(
    phi: &Matrix,
    y: &DenseVector,
    cfg: &SolverConfig,
    spectrum: SingularRange,
) -> Result<SolveResult> {
    let mu = spectrum.mu();
    if !(spectrum.min > 0.0) || !(mu < 1.0) {
        return Err(Error::DegenerateSpectrum { sigma_min: spectrum.min });
    }
    let weights = if cfg.richardson_fixed_omega {
        Weights::Richardson { omega: richardson_omega(mu)? }
    } else {
        Weights::Chebyshev { mu }
    };
    run(phi, y, cfg, Variant { weights: Some(weights), least_squares: cfg.least_squares })
}

fn run(phi: &Matrix, y: &DenseVector, cfg: &SolverConfig, variant: Variant) -> Result<SolveResult> {
    cfg.validate(phi, y)?;
    let gamma = cfg.gamma.fixed().ok_or_else(|| invalid("this solver needs a fixed step-length; use mfr_adaptive"))?;
    let n = phi.cols();
    let yv = y.as_dvector();

    let mut x = SparseVector::zero(n)?;
    let mut x_prev = x.clone();
    let mut r = yv.clone();
    let mut ls_support: Vec<usize> = Vec::new();
    let mut omega = 1.0;
    let mut fallbacks = 0;
    let mut trace = Trace::new(cfg.record_iterates);
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    // pass 0 produces x⁽¹⁾ from x⁽⁰⁾ = 0
    for pass in 0..=cfg.max_iter {
        let g = phi.as_dmatrix().tr_mul(&r);
        let mut a = x.to_dense_vec();
        match variant.weights {
            Some(w) if pass > 0 => {
                omega = match w {
                    Weights::Chebyshev { mu } => chebyshev_omega(omega, mu)?,
                    Weights::Richardson { omega } => omega,
                };
                let prev = x_prev.to_dense_vec();
                for ((ai, &gi), pi) in a.iter_mut().zip(g.iter()).zip(prev) {
                    *ai = pi + omega * (gamma * gi + *ai - pi);
                }
            }
            _ => {
                for (ai, &gi) in a.iter_mut().zip(g.iter()) {
                    *ai += gamma * gi;
                }
            }
        }
        if a.iter().any(|v| !v.is_finite()) {
            stop = StopReason::Diverged;
            break;
        }

        let support = top_support(&a, cfg.s_hat);
        let mut values: Vec<f64> = support.iter().map(|&i| a[i]).collect();
        let mut refit = false;
        if variant.least_squares && support != ls_support {
            match solve_on_sorted_support(phi, &support, yv) {
                Ok(z) => {
                    values = z;
                    ls_support.clone_from(&support);
                    refit = true;
                }
                Err(Error::RankDeficient { .. }) => fallbacks += 1,
                Err(e) => return Err(e),
            }
        }

        let next = SparseVector::from_parts_unchecked(n, support, values);
        let r_next = residual_of(phi, yv, next.support(), next.values());
        let delta = next.distance(&x);
        trace.push(&next, r_next.norm(), delta, gamma, refit);

        if refit && variant.weights.is_some() {
            omega = 1.0;
            x_prev = next.clone();
        } else {
            x_prev = x;
        }
        x = next;
        r = r_next;

        if pass > 0 {
            iterations = pass;
            if delta < cfg.tol {
                stop = StopReason::Converged;
                break;
            }
        }
    }
    Ok(trace.finish(x, iterations, stop, fallbacks))
}
