//! Plain CSV formats for matrices and vectors.
//!
//! * matrix: row-major, one matrix row per line, no header
//! * dense vector: one value per line (a single comma-separated line is also accepted)
//! * sparse vector: a `dim,<n>` header line followed by `<index>,<value>` lines, 1-based

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::signals::{DenseVector, Matrix, SparseVector};

/// Formats a float so that parsing it back yields the same bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn write_string(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    f.write_all(text.as_bytes()).map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_owned(), message: message.into() }
}

fn parse_rows(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(lineno, line)| {
            line.split(',')
                .map(|field| {
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| parse_err(path, format!("line {}: {:?}: {e}", lineno + 1, field.trim())))
                })
                .collect()
        })
        .collect()
}

pub fn matrix_to_csv(phi: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..phi.rows() {
        let row: Vec<String> = (0..phi.cols()).map(|j| fmt_f64(phi.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(phi: &Matrix, path: &Path) -> Result<()> {
    write_string(path, &matrix_to_csv(phi))
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let rows = parse_rows(path, &read_to_string(path)?)?;
    if rows.is_empty() {
        return Err(parse_err(path, "empty matrix file"));
    }
    Matrix::from_rows(&rows).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_dense_csv(v: &DenseVector, path: &Path) -> Result<()> {
    let text: String = v.iter().map(|x| fmt_f64(*x) + "\n").collect();
    write_string(path, &text)
}

pub fn read_dense_csv(path: &Path) -> Result<DenseVector> {
    let rows = parse_rows(path, &read_to_string(path)?)?;
    let is_column = rows.iter().all(|r| r.len() == 1);
    let values: Vec<f64> = match rows.len() {
        1 => rows.into_iter().next().unwrap_or_default(),
        _ if is_column => rows.into_iter().flatten().collect(),
        _ => return Err(parse_err(path, "expected one value per line or a single row")),
    };
    DenseVector::new(values).map_err(|e| parse_err(path, e.to_string()))
}

pub fn sparse_to_csv(x: &SparseVector) -> String {
    let mut out = format!("dim,{}\n", x.dim());
    for (i, v) in x.iter() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_f64(v)));
    }
    out
}

pub fn write_sparse_csv(x: &SparseVector, path: &Path) -> Result<()> {
    write_string(path, &sparse_to_csv(x))
}

pub fn parse_sparse_csv(text: &str) -> Result<SparseVector> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| invalid("missing `dim,n` header"))?;
    let dim = match header.split_once(',') {
        Some((key, n)) if key.trim() == "dim" => {
            n.trim().parse::<usize>().map_err(|e| invalid(format!("bad dimension {n:?}: {e}")))?
        }
        _ => return Err(invalid(format!("expected `dim,n` header, got {header:?}"))),
    };
    let mut entries = Vec::new();
    for line in lines {
        let (i, v) = line.split_once(',').ok_or_else(|| invalid(format!("expected `index,value`, got {line:?}")))?;
        let i: usize = i.trim().parse().map_err(|e| invalid(format!("bad index {i:?}: {e}")))?;
        let v: f64 = v.trim().parse().map_err(|e| invalid(format!("bad value {v:?}: {e}")))?;
        if i == 0 {
            return Err(invalid("sparse indices are 1-based"));
        }
        entries.push((i - 1, v));
    }
    entries.sort_by_key(|e| e.0);
    let (support, values) = entries.into_iter().unzip();
    SparseVector::new(dim, support, values)
}

pub fn read_sparse_csv(path: &Path) -> Result<SparseVector> {
    parse_sparse_csv(&read_to_string(path)?).map_err(|e| parse_err(path, e.to_string()))
}
