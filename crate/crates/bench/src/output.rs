//! CSV emission and summary tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing a
//! cell gives back the exact double.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::runner::InstanceResult;

pub const HEADER: [&str; 9] = [
    "instance_id",
    "seed",
    "algorithm",
    "k",
    "oracle_calls",
    "epoch",
    "residual_sq",
    "fb_residual_sq",
    "wallclock_ns",
];

pub const MEAN_HEADER: [&str; 6] = ["algorithm", "probe", "runs", "epoch", "residual_sq", "fb_residual_sq"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn instance_path(out: &Path, result: &InstanceResult) -> PathBuf {
    out.join(format!("{}.csv", result.instance_id))
}

pub fn write_instance(out: &Path, result: &InstanceResult) -> Result<PathBuf> {
    let path = instance_path(out, result);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(HEADER)?;
    for cell in &result.cells {
        for r in &cell.trace.records {
            w.write_record([
                cell.instance_id.clone(),
                cell.seed.to_string(),
                cell.algorithm.clone(),
                r.k.to_string(),
                r.oracle_calls.to_string(),
                fmt_f64(r.epoch),
                fmt_f64(r.residual_sq),
                fmt_f64(r.fb_residual_sq),
                r.wallclock_ns.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(path)
}

/// One row of the mean-over-seeds table.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub algorithm: String,
    pub probe: usize,
    pub runs: usize,
    pub epoch: f64,
    pub residual_sq: f64,
    pub fb_residual_sq: f64,
}

/// Means over seeds of the `j`-th record of each run, per algorithm. Runs
/// shorter than `j + 1` records (diverged ones) drop out of the later means.
pub fn mean_rows(results: &[InstanceResult]) -> Vec<MeanRow> {
    let mut algorithms: Vec<String> = Vec::new();
    for c in results.iter().flat_map(|r| &r.cells) {
        if !algorithms.contains(&c.algorithm) {
            algorithms.push(c.algorithm.clone());
        }
    }
    let mut rows = Vec::new();
    for alg in algorithms {
        let traces: Vec<_> =
            results.iter().flat_map(|r| &r.cells).filter(|c| c.algorithm == alg).map(|c| &c.trace.records).collect();
        let longest = traces.iter().map(|t| t.len()).max().unwrap_or(0);
        for j in 0..longest {
            let recs: Vec<_> = traces.iter().filter_map(|t| t.get(j)).collect();
            let m = recs.len() as f64;
            rows.push(MeanRow {
                algorithm: alg.clone(),
                probe: j,
                runs: recs.len(),
                epoch: recs.iter().map(|r| r.epoch).sum::<f64>() / m,
                residual_sq: recs.iter().map(|r| r.residual_sq).sum::<f64>() / m,
                fb_residual_sq: recs.iter().map(|r| r.fb_residual_sq).sum::<f64>() / m,
            });
        }
    }
    rows
}

pub fn write_mean(out: &Path, experiment: &str, results: &[InstanceResult]) -> Result<PathBuf> {
    let path = out.join(format!("{experiment}_mean.csv"));
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(MEAN_HEADER)?;
    for r in mean_rows(results) {
        w.write_record([
            r.algorithm,
            r.probe.to_string(),
            r.runs.to_string(),
            fmt_f64(r.epoch),
            fmt_f64(r.residual_sq),
            fmt_f64(r.fb_residual_sq),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes every instance CSV plus the aggregate; returns the paths written.
pub fn write_all(out: &Path, experiment: &str, results: &[InstanceResult]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut paths = Vec::with_capacity(results.len() + 1);
    for r in results {
        paths.push(write_instance(out, r)?);
    }
    paths.push(write_mean(out, experiment, results)?);
    Ok(paths)
}

/// Final mean residual², runs, diverged runs and oracle calls per algorithm.
pub fn summary(results: &[InstanceResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>5} {:>8} {:>16} {:>10} {:>14}", "algorithm", "runs", "diverged", "final res^2", "epochs", "oracle calls");
    let mut seen: Vec<&str> = Vec::new();
    for c in results.iter().flat_map(|r| &r.cells) {
        if seen.contains(&c.algorithm.as_str()) {
            continue;
        }
        seen.push(&c.algorithm);
        let cells: Vec<_> = results.iter().flat_map(|r| &r.cells).filter(|d| d.algorithm == c.algorithm).collect();
        let finals: Vec<_> = cells.iter().filter_map(|d| d.trace.last()).collect();
        let m = finals.len().max(1) as f64;
        let diverged = cells.iter().filter(|d| d.trace.failed).count();
        let res = finals.iter().map(|r| r.residual_sq).sum::<f64>() / m;
        let ep = finals.iter().map(|r| r.epoch).sum::<f64>() / m;
        let calls: u64 = finals.iter().map(|r| r.oracle_calls).sum();
        let _ = writeln!(s, "{:<14} {:>5} {:>8} {:>16.6e} {:>10.2} {:>14}", c.algorithm, cells.len(), diverged, res, ep, calls);
    }
    s
}
