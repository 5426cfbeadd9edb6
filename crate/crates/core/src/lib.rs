//! Sparse recovery by modified frame reconstruction (MFR): iterative hard
//! thresholding solvers, measurement ensembles, restricted isometry analysis
//! and a Monte-Carlo benchmark harness.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod io;
pub mod reconstruct;
pub mod rip;
pub mod sensing;
pub mod signals;

pub use error::{Error, Result};
