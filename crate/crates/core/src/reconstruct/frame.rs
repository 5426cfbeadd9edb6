use serde::{Deserialize, Serialize};

use super::engine::Trace;
use super::spectrum::SingularRange;
use super::{SolveResult, StopReason, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{invalid, Result};
use crate::signals::{DenseVector, Matrix, SparseVector};

/// Lower and upper frame bounds `0 < A ≤ B` bracketing the spectrum of `ΦᵀΦ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    lower: f64,
    upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0) || !(upper >= lower) || !upper.is_finite() {
            return Err(invalid(format!("frame bounds need 0 < A <= B < inf, got A={lower}, B={upper}")));
        }
        Ok(Self { lower, upper })
    }

    /// `A = σ²min`, `B = σ²max` of a matrix with full column rank.
    pub fn of(phi: &Matrix) -> Result<Self> {
        if phi.rows() < phi.cols() {
            return Err(invalid(format!("a {}x{} matrix cannot have positive definite ΦᵀΦ", phi.rows(), phi.cols())));
        }
        let sv = SingularRange::of(phi);
        let (lower, upper) = (sv.min * sv.min, sv.max * sv.max);
        if !(lower > f64::EPSILON * upper * phi.rows() as f64) {
            return Err(invalid("ΦᵀΦ is not positive definite"));
        }
        Self::new(lower, upper)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Contraction factor `(B − A)/(B + A)`.
    pub fn mu(&self) -> f64 {
        (self.upper - self.lower) / (self.upper + self.lower)
    }

    /// Step `2/(A + B)`.
    pub fn step(&self) -> f64 {
        2.0 / (self.lower + self.upper)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameConfig {
    /// Computed from the singular values of Φ when absent.
    pub bounds: Option<FrameBounds>,
    pub tol: f64,
    pub max_iter: usize,
    pub record_iterates: bool,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self { bounds: None, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, record_iterates: false }
    }
}

/// Frame reconstruction `x⁽ⁱ⁺¹⁾ = x⁽ⁱ⁾ + (2/(A+B)) Φᵀ(y − Φx⁽ⁱ⁾)` from `x⁽⁰⁾ = 0`.
///
/// With `y = Φx` the error obeys `‖x − x⁽ᵏ⁾‖ ≤ ((B−A)/(B+A))ᵏ ‖x‖`.
pub fn frame_reconstruct(phi: &Matrix, y: &DenseVector, cfg: &FrameConfig) -> Result<SolveResult> {
    if y.len() != phi.rows() {
        return Err(invalid(format!("observation has length {} but the matrix has {} rows", y.len(), phi.rows())));
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(invalid("frame iteration needs tol > 0 and max_iter >= 1"));
    }
    // positive definiteness is checked even when bounds are supplied
    let computed = FrameBounds::of(phi)?;
    let bounds = cfg.bounds.unwrap_or(computed);
    let step = bounds.step();
    let a = phi.as_dmatrix();
    let yv = y.as_dvector();
    let n = phi.cols();

    let mut x = nalgebra::DVector::<f64>::zeros(n);
    let mut r = yv.clone();
    let mut trace = Trace::new(cfg.record_iterates);
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;
    for pass in 0..=cfg.max_iter {
        let next = &x + a.tr_mul(&r) * step;
        let r_next = yv - a * &next;
        let delta = (&next - &x).norm();
        let sparse = SparseVector::from_dense(&DenseVector::from_dvector(next.clone()), 0.0);
        trace.push(&sparse, r_next.norm(), delta, step, false);
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
    let x_hat = SparseVector::from_dense(&DenseVector::from_dvector(x), 0.0);
    Ok(trace.finish(x_hat, iterations, stop, 0))
}
