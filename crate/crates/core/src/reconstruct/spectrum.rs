use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::signals::Matrix;

/// Above this many columns the extreme singular values come from power and
/// inverse-power iteration instead of a full decomposition.
pub const DENSE_SVD_COLUMN_LIMIT: usize = 2000;

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 20_000;

/// Smallest and largest of the `min(m, n)` singular values of a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularRange {
    pub min: f64,
    pub max: f64,
}

impl SingularRange {
    pub fn of(phi: &Matrix) -> Self {
        Self::with_limit(phi, DENSE_SVD_COLUMN_LIMIT)
    }

    pub(crate) fn with_limit(phi: &Matrix, column_limit: usize) -> Self {
        if phi.cols() <= column_limit {
            let sv = phi.singular_values();
            Self { min: *sv.last().unwrap_or(&0.0), max: sv[0] }
        } else {
            let (lo, hi) = gram_extremes(phi.as_dmatrix());
            Self { min: lo.max(0.0).sqrt(), max: hi.sqrt() }
        }
    }

    /// `(σ²max − σ²min)/(σ²max + σ²min)`.
    pub fn mu(&self) -> f64 {
        let (a, b) = (self.min * self.min, self.max * self.max);
        if a + b == 0.0 {
            return 1.0;
        }
        (b - a) / (b + a)
    }
}

/// Extreme eigenvalues of the smaller Gram matrix of `a`.
fn gram_extremes(a: &DMatrix<f64>) -> (f64, f64) {
    let gram = if a.nrows() <= a.ncols() { a * a.transpose() } else { a.tr_mul(a) };
    let dim = gram.nrows();
    let start = DVector::from_fn(dim, |i, _| 1.0 + (i as f64 * 0.618_033_988_75).fract());
    let hi = power_iteration(|v| &gram * v, start.clone());
    let lo = match gram.clone().cholesky() {
        Some(chol) => {
            let inv = power_iteration(|v| chol.solve(v), start);
            if inv > 0.0 {
                1.0 / inv
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    (lo, hi)
}

fn power_iteration(apply: impl Fn(&DVector<f64>) -> DVector<f64>, mut v: DVector<f64>) -> f64 {
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{generate_matrix, EnsembleKind, EnsembleSpec};

    #[test]
    fn iterative_path_matches_decomposition() {
        for (m, n) in [(20, 60), (40, 25)] {
            let phi = generate_matrix(&EnsembleSpec { kind: EnsembleKind::Gaussian, m, n, seed: 3 }).unwrap();
            let dense = SingularRange::with_limit(&phi, usize::MAX);
            let iter = SingularRange::with_limit(&phi, 0);
            assert!((dense.max - iter.max).abs() < 1e-6 * dense.max, "{dense:?} {iter:?}");
            assert!((dense.min - iter.min).abs() < 1e-6 * dense.max, "{dense:?} {iter:?}");
        }
    }

    #[test]
    fn mu_of_orthogonal_matrix_is_zero() {
        let r = SingularRange::of(&Matrix::identity(4).unwrap());
        assert_eq!(r.mu(), 0.0);
    }

    #[test]
    fn rank_deficient_gram_has_zero_minimum() {
        let phi = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 0.0]]).unwrap();
        let r = SingularRange::with_limit(&phi, 0);
        assert!(r.min < 1e-6, "{r:?}");
    }
}
