//! Vector and matrix value types, norms and the hard-thresholding operator.
//!
//! Indices are 0-based in the Rust API. Every external format (CSV, JSON,
//! CLI output) uses 1-based indices.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// A dense real vector with at least one entry, all finite.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector(DVector<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("vector must have at least one entry"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("vector entry {} is not finite", i + 1)));
        }
        Ok(Self(DVector::from_vec(values)))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("vector must have at least one entry"));
        }
        Ok(Self(DVector::zeros(len)))
    }

    pub(crate) fn from_dvector(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0.data.into()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A vector of dimension `dim` stored as a strictly increasing support and the
/// values on it.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    dim: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new(dim: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("sparse vector dimension must be positive"));
        }
        if support.len() != values.len() {
            return Err(invalid(format!(
                "support has {} indices but {} values were given",
                support.len(),
                values.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("support indices must be strictly increasing"));
        }
        if let Some(&last) = support.last() {
            if last >= dim {
                return Err(invalid(format!("support index {} outside dimension {dim}", last + 1)));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sparse vector values must be finite"));
        }
        Ok(Self { dim, support, values })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), Vec::new())
    }

    pub(crate) fn from_parts_unchecked(dim: usize, support: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(support.len(), values.len());
        Self { dim, support, values }
    }

    /// Keeps the entries of `v` whose magnitude exceeds `zero_tol`.
    pub fn from_dense(v: &DenseVector, zero_tol: f64) -> Self {
        let (support, values) = v.iter().enumerate().filter(|(_, x)| x.abs() > zero_tol).map(|(i, &x)| (i, x)).unzip();
        Self { dim: v.len(), support, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.support.binary_search(&i) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DenseVector {
        DenseVector(DVector::from_vec(self.to_dense_vec()))
    }

    pub(crate) fn to_dense_vec(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    /// Drops stored entries with magnitude at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let (support, values) = self.iter().filter(|(_, v)| v.abs() > tol).unzip();
        Self { dim: self.dim, support, values }
    }

    /// ℓ2 distance between two sparse vectors of equal dimension.
    pub fn distance(&self, other: &SparseVector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.nnz() || j < other.nnz() {
            let a = self.support.get(i).copied().unwrap_or(usize::MAX);
            let b = other.support.get(j).copied().unwrap_or(usize::MAX);
            let d = match a.cmp(&b) {
                Ordering::Less => {
                    i += 1;
                    self.values[i - 1]
                }
                Ordering::Greater => {
                    j += 1;
                    -other.values[j - 1]
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    self.values[i - 1] - other.values[j - 1]
                }
            };
            acc += d * d;
        }
        acc.sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl fmt::Display for SparseVector {
    /// Prints `{index: value, ...}` with 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, v)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", i + 1, v)?;
        }
        write!(f, "}}")
    }
}

/// A dense real `rows × cols` matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix must have at least one row and one column"));
        }
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(invalid("matrix rows have differing lengths"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), ncols, &flat)
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(invalid("matrix must have at least one row and one column"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_dmatrix(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Columns listed in `columns`, in that order.
    pub fn column_submatrix(&self, columns: &[usize]) -> Result<Matrix> {
        if columns.is_empty() {
            return Err(invalid("column set must be nonempty"));
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.cols()) {
            return Err(invalid(format!("column {} outside a matrix with {} columns", bad + 1, self.cols())));
        }
        Ok(Matrix(self.0.select_columns(columns)))
    }

    pub fn scaled(&self, factor: f64) -> Result<Matrix> {
        Self::from_dmatrix(&self.0 * factor)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    /// Singular values in decreasing order (`min(rows, cols)` of them).
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.0.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn mul_dense(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.cols() {
            return Err(invalid(format!("matrix has {} columns but vector has length {}", self.cols(), x.len())));
        }
        Ok(DenseVector(&self.0 * x.as_dvector()))
    }

    pub fn mul_sparse(&self, x: &SparseVector) -> Result<DenseVector> {
        if x.dim() != self.cols() {
            return Err(invalid(format!("matrix has {} columns but vector has dimension {}", self.cols(), x.dim())));
        }
        Ok(DenseVector(self.mul_sparse_raw(x.support(), x.values())))
    }

    pub fn tr_mul_dense(&self, r: &DenseVector) -> Result<DenseVector> {
        if r.len() != self.rows() {
            return Err(invalid(format!("matrix has {} rows but vector has length {}", self.rows(), r.len())));
        }
        Ok(DenseVector(self.0.tr_mul(r.as_dvector())))
    }

    /// `Φ_Γ z` for a support `Γ` and coefficients `z`.
    pub(crate) fn mul_sparse_raw(&self, support: &[usize], values: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.rows());
        for (&j, &v) in support.iter().zip(values) {
            out.axpy(v, &self.0.column(j), 1.0);
        }
        out
    }
}

/// Indices of the `tau` largest-magnitude nonzero entries of `v`, ascending.
///
/// Entries are ranked by descending magnitude and then ascending index, so
/// the smaller index wins a magnitude tie.
pub(crate) fn top_support(v: &[f64], tau: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
    if idx.len() > tau {
        let rank = |a: &usize, b: &usize| v[*b].abs().total_cmp(&v[*a].abs()).then(a.cmp(b));
        if tau > 0 {
            idx.select_nth_unstable_by(tau - 1, rank);
        }
        idx.truncate(tau);
    }
    idx.sort_unstable();
    idx
}

/// Best `tau`-term approximation of `v` (the hard-thresholding operator).
pub fn hard_threshold(v: &DenseVector, tau: usize) -> Result<SparseVector> {
    if tau == 0 || tau > v.len() {
        return Err(invalid(format!("threshold level must lie in 1..={}, got {tau}", v.len())));
    }
    let support = top_support(v.as_slice(), tau);
    let values = support.iter().map(|&i| v[i]).collect();
    Ok(SparseVector::from_parts_unchecked(v.len(), support, values))
}

pub fn lp_norm(v: &DenseVector, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be a finite value >= 1, got {p}")));
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        return Ok(v.norm());
    }
    // scale by the largest magnitude to avoid overflow in |x|^p
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / scale).powf(p)).sum();
    Ok(scale * sum.powf(1.0 / p))
}

/// Number of entries with magnitude strictly above `zero_tol`.
pub fn l0_norm(v: &DenseVector, zero_tol: f64) -> usize {
    v.iter().filter(|x| x.abs() > zero_tol).count()
}

/// Whether two sparse vectors have the same support set.
pub fn support_match(a: &SparseVector, b: &SparseVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(a.support() == b.support())
}
