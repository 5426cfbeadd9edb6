use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::signals::{DenseVector, Matrix, SparseVector};

/// Relative threshold on the diagonal of R below which a column is treated
/// as linearly dependent on its predecessors.
const RANK_RTOL: f64 = 1e-12;

/// Minimiser of `‖y − Φ_Γ z‖₂`, returned as a sparse vector on `Γ`.
///
/// `columns` may be given in any order; duplicates are rejected. The empty
/// set yields the zero vector.
pub fn least_squares_on_support(phi: &Matrix, columns: &[usize], y: &DenseVector) -> Result<SparseVector> {
    if y.len() != phi.rows() {
        return Err(invalid(format!("observation has length {} but the matrix has {} rows", y.len(), phi.rows())));
    }
    let mut support = columns.to_vec();
    support.sort_unstable();
    if support.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("support contains duplicate indices"));
    }
    if let Some(&bad) = support.iter().find(|&&c| c >= phi.cols()) {
        return Err(invalid(format!("support index {} outside {} columns", bad + 1, phi.cols())));
    }
    let values = solve_on_sorted_support(phi, &support, y.as_dvector())?;
    SparseVector::new(phi.cols(), support, values)
}

/// Least squares on an already validated, ascending support.
pub(crate) fn solve_on_sorted_support(phi: &Matrix, support: &[usize], y: &DVector<f64>) -> Result<Vec<f64>> {
    let k = support.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let m = phi.rows();
    if k > m {
        return Err(Error::RankDeficient { rank: m, cols: k });
    }
    let sub: DMatrix<f64> = phi.as_dmatrix().select_columns(support);
    let qr = sub.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let cutoff = RANK_RTOL * diag_max.max(f64::MIN_POSITIVE);
    let rank = r.diagonal().iter().filter(|d| d.abs() > cutoff).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, cols: k });
    }
    let solve = |b: &DVector<f64>| {
        let mut rhs = b.clone();
        qr.q_tr_mul(&mut rhs);
        r.solve_upper_triangular(&rhs.rows(0, k).into_owned()).ok_or(Error::RankDeficient { rank, cols: k })
    };
    let mut z = solve(y)?;
    // one refinement step against the rounding of the first solve
    z += solve(&(y - &sub * &z))?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankDeficient { rank, cols: k });
    }
    Ok(z.iter().copied().collect())
}
