use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::records::fmt17;
use super::{cmp_gamma, CellGamma, TrialRecord};
use crate::error::{invalid, Error, Result};
use crate::reconstruct::Algorithm;

/// Per-cell statistics. Iteration statistics cover every trial in the cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub s_hat: usize,
    pub gamma: CellGamma,
    pub trials: usize,
    pub successes: usize,
    pub converged: usize,
    /// Percentage in `[0, 100]`.
    pub success_rate: f64,
    pub mean_iterations: f64,
    pub median_iterations: f64,
    pub q1_iterations: f64,
    pub q3_iterations: f64,
    pub mean_wall_time_s: f64,
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn same_cell(a: &TrialRecord, b: &TrialRecord) -> bool {
    a.algorithm == b.algorithm && a.n == b.n && a.m == b.m && a.s == b.s && a.s_hat == b.s_hat && a.gamma == b.gamma
}

/// Groups records by cell, in order of first appearance.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<CellSummary>> {
    if records.is_empty() {
        return Err(invalid("cannot summarize an empty record set"));
    }
    let mut groups: Vec<Vec<&TrialRecord>> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|g| same_cell(g[0], r)) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    Ok(groups
        .into_iter()
        .map(|g| {
            let first = g[0];
            let trials = g.len();
            let successes = g.iter().filter(|r| r.success).count();
            let mut iters: Vec<f64> = g.iter().map(|r| r.iterations as f64).collect();
            iters.sort_by(f64::total_cmp);
            CellSummary {
                algorithm: first.algorithm,
                n: first.n,
                m: first.m,
                s: first.s,
                s_hat: first.s_hat,
                gamma: first.gamma,
                trials,
                successes,
                converged: g.iter().filter(|r| r.converged).count(),
                success_rate: 100.0 * successes as f64 / trials as f64,
                mean_iterations: iters.iter().sum::<f64>() / trials as f64,
                median_iterations: quantile(&iters, 0.5),
                q1_iterations: quantile(&iters, 0.25),
                q3_iterations: quantile(&iters, 0.75),
                mean_wall_time_s: g.iter().map(|r| r.wall_time_s).sum::<f64>() / trials as f64,
            }
        })
        .collect())
}

const SUMMARY_COLUMNS: [&str; 15] = [
    "algorithm",
    "n",
    "m",
    "s",
    "s_hat",
    "gamma",
    "trials",
    "successes",
    "converged",
    "success_pct",
    "mean_iterations",
    "median_iterations",
    "q1_iterations",
    "q3_iterations",
    "mean_wall_time_s",
];

fn gamma_text(g: &CellGamma) -> String {
    match g {
        CellGamma::Fixed(v) => fmt17(*v),
        other => other.to_string(),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per cell.
pub fn summary_to_csv(summary: &[CellSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS)?;
    for c in summary {
        w.write_record([
            c.algorithm.to_string(),
            c.n.to_string(),
            c.m.to_string(),
            c.s.to_string(),
            c.s_hat.to_string(),
            gamma_text(&c.gamma),
            c.trials.to_string(),
            c.successes.to_string(),
            c.converged.to_string(),
            fmt17(c.success_rate),
            fmt17(c.mean_iterations),
            fmt17(c.median_iterations),
            fmt17(c.q1_iterations),
            fmt17(c.q3_iterations),
            fmt17(c.mean_wall_time_s),
        ])?;
    }
    finish(w)
}

/// Success percentages laid out with one row per `s_hat` and one column per
/// true `s`, one block per (algorithm, step-length). Missing cells are empty.
pub fn pivot_to_csv(summary: &[CellSummary]) -> Result<String> {
    let mut s_values: Vec<usize> = summary.iter().map(|c| c.s).collect();
    s_values.sort_unstable();
    s_values.dedup();
    let mut blocks: Vec<(Algorithm, CellGamma)> = Vec::new();
    for c in summary {
        if !blocks.contains(&(c.algorithm, c.gamma)) {
            blocks.push((c.algorithm, c.gamma));
        }
    }
    blocks.sort_by(|a, b| a.0.cmp(&b.0).then(cmp_gamma(&a.1, &b.1)));

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["algorithm".to_string(), "gamma".to_string(), "s_hat".to_string()];
    header.extend(s_values.iter().map(|s| format!("s={s}")));
    w.write_record(&header)?;
    for (algorithm, gamma) in blocks {
        let cells: Vec<&CellSummary> =
            summary.iter().filter(|c| c.algorithm == algorithm && c.gamma == gamma).collect();
        let mut s_hats: Vec<usize> = cells.iter().map(|c| c.s_hat).collect();
        s_hats.sort_unstable();
        s_hats.dedup();
        for s_hat in s_hats {
            let mut row = vec![algorithm.to_string(), gamma_text(&gamma), s_hat.to_string()];
            for &s in &s_values {
                row.push(
                    cells
                        .iter()
                        .find(|c| c.s == s && c.s_hat == s_hat)
                        .map(|c| format!("{:.1}", c.success_rate))
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row)?;
        }
    }
    finish(w)
}

pub fn write_summary_csv(summary: &[CellSummary], path: &Path, pivot: bool) -> Result<()> {
    let text = if pivot { pivot_to_csv(summary)? } else { summary_to_csv(summary)? };
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
