use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers, generators and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exhaustive enumeration would visit more subsets than allowed.
    #[error("subset budget exceeded: {needed} subsets required, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("rank-deficient submatrix: numerical rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    /// The polynomial acceleration weight is undefined because the smallest
    /// singular value of the measurement matrix vanishes.
    #[error("degenerate spectrum (mu = 1): smallest singular value is {sigma_min:e}; use the plain solver")]
    DegenerateSpectrum { sigma_min: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
