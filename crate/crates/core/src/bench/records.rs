use std::fs;
use std::path::Path;

use super::{CellGamma, TrialRecord};
use crate::error::{Error, Result};

pub const RECORD_COLUMNS: [&str; 13] = [
    "algorithm",
    "n",
    "m",
    "s",
    "s_hat",
    "gamma",
    "trial",
    "seed",
    "success",
    "converged",
    "iterations",
    "final_residual",
    "wall_time_s",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub(crate) fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn gamma_field(g: &CellGamma) -> String {
    match g {
        CellGamma::Fixed(v) => fmt17(*v),
        other => other.to_string(),
    }
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.algorithm.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.s.to_string(),
            r.s_hat.to_string(),
            gamma_field(&r.gamma),
            r.trial.to_string(),
            r.seed.to_string(),
            r.success.to_string(),
            r.converged.to_string(),
            r.iterations.to_string(),
            fmt17(r.final_residual),
            fmt17(r.wall_time_s),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let text = records_to_csv(records)?;
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: u64) -> std::result::Result<T, String> {
    let raw = row.get(i).ok_or_else(|| format!("line {line}: missing column {}", RECORD_COLUMNS[i]))?;
    raw.trim().parse().map_err(|_| format!("line {line}: bad {} value {raw:?}", RECORD_COLUMNS[i]))
}

pub fn parse_records_csv(text: &str) -> std::result::Result<Vec<TrialRecord>, String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| e.to_string())?;
    if header.iter().map(str::trim).ne(RECORD_COLUMNS) {
        return Err(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()));
    }
    let mut out = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let line = k as u64 + 2;
        let algorithm = row.get(0).unwrap_or("").parse().map_err(|e: Error| format!("line {line}: {e}"))?;
        let gamma: CellGamma = row.get(5).unwrap_or("").parse().map_err(|e: Error| format!("line {line}: {e}"))?;
        out.push(TrialRecord {
            algorithm,
            n: field(&row, 1, line)?,
            m: field(&row, 2, line)?,
            s: field(&row, 3, line)?,
            s_hat: field(&row, 4, line)?,
            gamma,
            trial: field(&row, 6, line)?,
            seed: field(&row, 7, line)?,
            success: field(&row, 8, line)?,
            converged: field(&row, 9, line)?,
            iterations: field(&row, 10, line)?,
            final_residual: field(&row, 11, line)?,
            wall_time_s: field(&row, 12, line)?,
        });
    }
    Ok(out)
}

pub fn read_records_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_records_csv(&text).map_err(|message| Error::Parse { path: path.to_path_buf(), message })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::Algorithm;

    fn record(trial: usize, residual: f64) -> TrialRecord {
        TrialRecord {
            algorithm: Algorithm::MfrLs,
            n: 400,
            m: 50,
            s: 4,
            s_hat: 8,
            gamma: CellGamma::Fixed(0.1 + 0.2),
            trial,
            seed: u64::MAX - trial as u64,
            success: trial.is_multiple_of(2),
            converged: true,
            iterations: 17,
            final_residual: residual,
            wall_time_s: 1.0 / 3.0,
        }
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(records_to_csv(&[]).unwrap(), format!("{}\n", RECORD_COLUMNS.join(",")));
    }

    #[test]
    fn round_trip_is_exact() {
        let mut records = vec![record(0, 1e-300), record(1, std::f64::consts::PI)];
        records.push(TrialRecord { gamma: CellGamma::Adaptive, algorithm: Algorithm::MfrAdaptive, ..record(2, 0.0) });
        records.push(TrialRecord { gamma: CellGamma::Frame, algorithm: Algorithm::Frame, ..record(3, 2.5) });
        let text = records_to_csv(&records).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("mfr_ls,400,50,4,8,3.0000000000000004e-1,0,"));
        assert_eq!(parse_records_csv(&text).unwrap(), records);
    }

    #[test]
    fn nan_residual_survives() {
        let text = records_to_csv(&[record(0, f64::NAN)]).unwrap();
        let back = parse_records_csv(&text).unwrap();
        assert!(back[0].final_residual.is_nan());
        assert!(back[0].same_outcome(&record(0, f64::NAN)));
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        write_records_csv(&[record(5, 0.25)], &path).unwrap();
        assert_eq!(read_records_csv(&path).unwrap(), vec![record(5, 0.25)]);
        assert!(matches!(read_records_csv(&dir.path().join("missing.csv")), Err(Error::Io { .. })));
        std::fs::write(&path, "algorithm,n\nmfr,3\n").unwrap();
        assert!(matches!(read_records_csv(&path), Err(Error::Parse { .. })));
        let bad = records_to_csv(&[record(5, 0.25)]).unwrap().replace(",17,", ",x,");
        assert!(parse_records_csv(&bad).unwrap_err().contains("iterations"));
    }
}
