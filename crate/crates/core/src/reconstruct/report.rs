use serde::{Deserialize, Serialize};

use super::{Algorithm, SolveResult, SolverConfig, StopReason};
use crate::signals::SparseVector;

/// A sparse vector in external form: 1-based support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseReport {
    pub dim: usize,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl From<&SparseVector> for SparseReport {
    fn from(x: &SparseVector) -> Self {
        Self { dim: x.dim(), support: x.support().iter().map(|i| i + 1).collect(), values: x.values().to_vec() }
    }
}

/// JSON form of a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub residual_l2: f64,
    pub residual_trace: Vec<f64>,
    pub iterate_delta_trace: Vec<f64>,
    pub gamma_trace: Vec<f64>,
    pub ls_steps: Vec<usize>,
    pub x_hat: SparseReport,
}

impl SolveReport {
    pub fn new(algorithm: Algorithm, config: &SolverConfig, result: &SolveResult) -> Self {
        Self {
            algorithm,
            config: config.clone(),
            iterations: result.iterations,
            converged: result.converged,
            stop_reason: result.stop_reason,
            residual_l2: result.residual_l2,
            residual_trace: result.residual_trace.clone(),
            iterate_delta_trace: result.iterate_delta_trace.clone(),
            gamma_trace: result.gamma_trace.clone(),
            ls_steps: result.ls_steps.clone(),
            x_hat: SparseReport::from(&result.x_hat),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
