//! Stepsize grid search over log-spaced multipliers of each method's base rule.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use vfog_core::solver::Budget;

use crate::config::{AlgoSpec, GridSection};
use crate::presets::Experiment;
use crate::runner::run_with;

/// `points` log-spaced values on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub multiplier: f64,
    pub eta: f64,
    /// Mean final residual² over the pilot seeds; `None` if any diverged.
    pub score: Option<f64>,
}

/// Index of the smallest finite score. Errors when every point diverged.
pub fn select_best(points: &[GridPoint]) -> Result<usize> {
    let best = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.score.filter(|s| s.is_finite()).map(|s| (i, s)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((i, _)) => Ok(i),
        None => {
            let failed: Vec<String> = points.iter().map(|p| format!("{:.3e}", p.multiplier)).collect();
            bail!("every grid point diverged (multipliers {})", failed.join(", "))
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub algorithm: String,
    pub points: Vec<GridPoint>,
    pub best: usize,
}

pub fn grid_search(exp: &Experiment, pool: &rayon::ThreadPool) -> Result<Vec<GridResult>> {
    let g: &GridSection = &exp.grid;
    let mults = log_grid(g.lo, g.hi, g.points);
    let budget = Budget { max_epochs: Some(g.pilot_epochs), ..Budget::default() };
    let mut out = Vec::new();
    for base in &exp.algorithms {
        let specs: Vec<AlgoSpec> =
            mults.iter().map(|&c| AlgoSpec { eta: None, eta_scale: Some(c), ..base.clone() }).collect();
        let labelled: Vec<AlgoSpec> =
            specs.iter().enumerate().map(|(i, s)| AlgoSpec { label: Some(format!("grid{i}")), ..s.clone() }).collect();
        let results = run_with(exp, &labelled, &g.seeds, &budget, pool)?;
        let points: Vec<GridPoint> = (0..mults.len())
            .map(|i| {
                let cells: Vec<_> = results.iter().map(|r| &r.cells[i]).collect();
                let score = if cells.iter().any(|c| c.trace.failed) {
                    None
                } else {
                    let finals: Vec<f64> = cells.iter().filter_map(|c| c.trace.last()).map(|r| r.residual_sq).collect();
                    Some(finals.iter().sum::<f64>() / finals.len() as f64)
                };
                GridPoint { multiplier: mults[i], eta: cells[0].eta, score }
            })
            .collect();
        let best = select_best(&points).map_err(|e| e.context(base.display()))?;
        out.push(GridResult { algorithm: base.display(), points, best });
    }
    Ok(out)
}

pub fn grid_table(results: &[GridResult]) -> String {
    let mut s = String::new();
    for r in results {
        let _ = writeln!(s, "{}", r.algorithm);
        for (i, p) in r.points.iter().enumerate() {
            let score = p.score.map_or("diverged".to_string(), |v| format!("{v:.6e}"));
            let mark = if i == r.best { "  <- best" } else { "" };
            let _ = writeln!(s, "  x{:<10.3e} eta = {:<12.4e} final res^2 = {score}{mark}", p.multiplier, p.eta);
        }
    }
    s
}
