//! Seeded measurement ensembles, sparse test signals and the forward model
//! `y = Φx + e`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signals::{DenseVector, Matrix, SparseVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// i.i.d. N(0, 1/m) entries.
    Gaussian,
    /// Columns drawn uniformly from the unit sphere in R^m.
    UnitSphereColumns,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub n: usize,
    pub s: usize,
    pub seed: u64,
    pub amplitude_variance: f64,
}

impl SignalSpec {
    pub fn new(n: usize, s: usize, seed: u64) -> Self {
        Self { n, s, seed, amplitude_variance: 1.0 }
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Injective mixing of a base seed with a stream index (splitmix64 finalizer
/// applied to `base + index * φ`, both bijections on u64 for fixed `base`).
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn generate_matrix(spec: &EnsembleSpec) -> Result<Matrix> {
    let EnsembleSpec { kind, m, n, seed } = *spec;
    if m == 0 || n == 0 {
        return Err(invalid(format!("ensemble shape must be positive, got {m}x{n}")));
    }
    let mut rng = rng(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    // column-major fill
    let mut mat = DMatrix::from_fn(m, n, |_, _| draw());
    match kind {
        EnsembleKind::Gaussian => mat /= (m as f64).sqrt(),
        EnsembleKind::UnitSphereColumns => {
            for mut col in mat.column_iter_mut() {
                let norm = col.norm();
                // a zero Gaussian column has probability zero
                debug_assert!(norm > 0.0);
                col /= norm;
            }
        }
    }
    Matrix::from_dmatrix(mat)
}

/// An s-sparse signal: uniformly random support, Gaussian amplitudes.
pub fn generate_sparse_signal(spec: &SignalSpec) -> Result<SparseVector> {
    let SignalSpec { n, s, seed, amplitude_variance } = *spec;
    if n == 0 {
        return Err(invalid("signal dimension must be positive"));
    }
    if s == 0 || s > n {
        return Err(invalid(format!("sparsity must lie in 1..={n}, got {s}")));
    }
    if !(amplitude_variance > 0.0) || !amplitude_variance.is_finite() {
        return Err(invalid("amplitude variance must be positive and finite"));
    }
    let mut rng = rng(seed);
    let mut support = rand::seq::index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let sd = amplitude_variance.sqrt();
    let values = (0..s)
        .map(|_| {
            // resample exact zeros so the support size is exactly s
            loop {
                let v: f64 = StandardNormal.sample(&mut rng);
                if v != 0.0 {
                    break sd * v;
                }
            }
        })
        .collect();
    SparseVector::new(n, support, values)
}

/// i.i.d. N(0, sigma²) noise of length `m`.
pub fn generate_noise(m: usize, sigma: f64, seed: u64) -> Result<DenseVector> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid("noise standard deviation must be finite and non-negative"));
    }
    let mut rng = rng(seed);
    DenseVector::new((0..m).map(|_| sigma * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect())
}

/// `Φ·x + e`, with `e = 0` when absent.
pub fn measure(phi: &Matrix, x: &SparseVector, noise: Option<&DenseVector>) -> Result<DenseVector> {
    let mut y = phi.mul_sparse(x)?;
    if let Some(e) = noise {
        if e.len() != phi.rows() {
            return Err(invalid(format!("noise has length {} but the matrix has {} rows", e.len(), phi.rows())));
        }
        y = DenseVector::from_dvector(y.as_dvector() + e.as_dvector());
    }
    Ok(y)
}

/// Rule-of-thumb measurement count `ceil(2 s ln n)`, clamped to `[1, n]`.
pub fn suggest_measurements(n: usize, s: usize) -> Result<usize> {
    if n < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {n}")));
    }
    if s == 0 || s > n {
        return Err(invalid(format!("sparsity must lie in 1..={n}, got {s}")));
    }
    let m = (2.0 * s as f64 * (n as f64).ln()).ceil() as usize;
    Ok(m.clamp(1, n))
}
