//! Stochastic estimators `G̃y` of `Gy` with exact oracle-call accounting.
//!
//! Memory is initialised by [`Estimator::init_full_pass`] at the starting
//! point, which plays the role of `y⁻¹`. Every later call to
//! [`Estimator::estimate`] receives the current query point and the previous
//! one, so the first estimate already uses the control variates.

pub mod schedule;

use crate::error::{config, Error, Result};
use crate::linalg::{self, RealVec};
use crate::operator::FiniteSumOperator;
use crate::rng::Rng;

pub use schedule::{
    epoch_cubic_batch, minibatch_schedule, practical_sarah, practical_svrg, schedule_saga,
    schedule_sarah, schedule_svrg, MinibatchVariant, TheoryInputs,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Exact,
    MiniBatch,
    LSvrg,
    Saga,
    LSarah,
}

/// Where `(b_k, p_k)` come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant { batch: usize, prob: f64 },
    /// `max{min, min{⌊coef·(l+1)³⌋, n}}` over the epoch counter `l`.
    EpochCubic { coef: f64, min: usize },
    Minibatch { sigma2: f64, delta: f64, nu: f64, s: f64, variant: MinibatchVariant },
    Svrg { inputs: TheoryInputs, nu: f64, c2: f64 },
    Saga { inputs: TheoryInputs },
    Sarah { inputs: TheoryInputs, nu: f64, c1: f64, fixed: bool },
}

impl Schedule {
    /// `(b_k, p_k)` at iteration `k` during epoch `epoch`.
    pub fn at(&self, n: usize, k: usize, epoch: usize) -> Result<(usize, f64)> {
        match self {
            Schedule::Constant { batch, prob } => Ok((*batch, *prob)),
            Schedule::EpochCubic { coef, min } => Ok((epoch_cubic_batch(*coef, *min, n, epoch), 1.0)),
            Schedule::Minibatch { sigma2, delta, nu, s, variant } => {
                Ok((minibatch_schedule(*sigma2, *delta, *nu, *s, k, *variant)?.min(n), 1.0))
            }
            Schedule::Svrg { inputs, nu, c2 } => schedule_svrg(inputs, *nu, *c2, k),
            Schedule::Saga { inputs } => Ok((schedule_saga(inputs, k)?, 1.0)),
            Schedule::Sarah { inputs, nu, c1, fixed } => schedule_sarah(inputs, *nu, *c1, k, *fixed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub schedule: Schedule,
    /// I.i.d. draws with replacement (default) or a uniform subset.
    pub with_replacement: bool,
    /// Oracle variance bound, used for the mini-batch `δ_k`.
    pub sigma2: f64,
    /// The solver's `s`, used for `t_k = k + s + 1` in the mini-batch `δ_k`.
    pub s: f64,
}

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind, schedule: Schedule) -> Self {
        Self { kind, schedule, with_replacement: true, sigma2: 0.0, s: 3.0 }
    }

    pub fn exact() -> Self {
        Self::new(EstimatorKind::Exact, Schedule::Constant { batch: 1, prob: 1.0 })
    }
}

/// Constants of the variance-reduction recursion for the active estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VrConstants {
    pub kappa: f64,
    pub theta: f64,
    pub delta: f64,
    /// Which quantity bounds the mean-squared error.
    pub tracker: &'static str,
}

#[derive(Debug, Clone)]
pub struct Estimator {
    cfg: EstimatorConfig,
    n: usize,
    dim: usize,
    calls: u64,
    k: usize,
    ready: bool,
    last_batch: usize,
    last_prob: f64,
    // L-SVRG
    snapshot: RealVec,
    snapshot_g: RealVec,
    // SAGA, row-major n × dim
    table: Vec<f64>,
    table_sum: RealVec,
    // L-SARAH
    running: RealVec,
}

impl Estimator {
    pub fn new(cfg: EstimatorConfig, op: &dyn FiniteSumOperator) -> Self {
        Self {
            cfg,
            n: op.n_components(),
            dim: op.dim(),
            calls: 0,
            k: 0,
            ready: false,
            last_batch: 0,
            last_prob: 1.0,
            snapshot: Vec::new(),
            snapshot_g: Vec::new(),
            table: Vec::new(),
            table_sum: Vec::new(),
            running: Vec::new(),
        }
    }

    pub fn kind(&self) -> EstimatorKind {
        self.cfg.kind
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn oracle_calls(&self) -> u64 {
        self.calls
    }

    /// Number of `estimate` calls so far.
    pub fn iteration(&self) -> usize {
        self.k
    }

    /// `(b_k, p_k)` used by the most recent estimate.
    pub fn last_batch_and_prob(&self) -> (usize, f64) {
        (self.last_batch, self.last_prob)
    }

    pub fn snapshot(&self) -> &[f64] {
        &self.snapshot
    }

    pub fn table_row(&self, i: usize) -> &[f64] {
        &self.table[i * self.dim..(i + 1) * self.dim]
    }

    pub fn running(&self) -> &[f64] {
        &self.running
    }

    fn epoch(&self) -> usize {
        (self.calls / self.n as u64) as usize
    }

    /// One full pass at `y0`; returns `Gy0` and seeds the estimator memory.
    pub fn init_full_pass(&mut self, op: &dyn FiniteSumOperator, y0: &[f64]) -> RealVec {
        let g = match self.cfg.kind {
            EstimatorKind::Saga => {
                self.table = vec![0.0; self.n * self.dim];
                self.table_sum = vec![0.0; self.dim];
                for i in 0..self.n {
                    let row = &mut self.table[i * self.dim..(i + 1) * self.dim];
                    op.eval_component_into(i, y0, row);
                    linalg::axpy(1.0, row, &mut self.table_sum);
                }
                linalg::scale(1.0 / self.n as f64, &self.table_sum)
            }
            _ => op.eval_full(y0),
        };
        self.calls += self.n as u64;
        match self.cfg.kind {
            EstimatorKind::LSvrg => {
                self.snapshot = y0.to_vec();
                self.snapshot_g = g.clone();
            }
            EstimatorKind::LSarah => self.running = g.clone(),
            _ => {}
        }
        self.ready = true;
        g
    }

    fn draw(&self, b: usize, rng: &mut Rng) -> Result<Vec<usize>> {
        if b == 0 {
            return config("empty batch");
        }
        if self.cfg.with_replacement {
            Ok(rng.batch_with_replacement(self.n, b))
        } else if b > self.n {
            config(format!("batch size {b} exceeds n = {} without replacement", self.n))
        } else {
            Ok(rng.batch_without_replacement(self.n, b))
        }
    }

    /// `G̃y` at the query point `y`; `y_prev` is the previous query point
    /// (the initial point on the first call).
    pub fn estimate(&mut self, op: &dyn FiniteSumOperator, y: &[f64], y_prev: &[f64], rng: &mut Rng) -> Result<RealVec> {
        if !self.ready {
            return Err(Error::Precondition("estimator used before init_full_pass".into()));
        }
        let k = self.k;
        let (b, p) = self.cfg.schedule.at(self.n, k, self.epoch())?;
        if self.cfg.kind != EstimatorKind::Exact && (b == 0 || b > self.n) {
            return config(format!("batch size must lie in [1, {}], got {b}", self.n));
        }
        if !(p > 0.0 && p <= 1.0) {
            return config(format!("probability must lie in (0, 1], got {p}"));
        }
        self.last_batch = b;
        self.last_prob = p;
        let n = self.n as u64;
        let bb = b as u64;
        let mut out = vec![0.0; self.dim];
        match self.cfg.kind {
            EstimatorKind::Exact => {
                op.eval_full_into(y, &mut out);
                self.calls += n;
            }
            EstimatorKind::MiniBatch => {
                let idx = self.draw(b, rng)?;
                op.eval_batch_mean_into(&idx, y, &mut out);
                self.calls += bb;
            }
            EstimatorKind::LSvrg => {
                // the refresh coin is flipped before the batch is used
                let refresh = k >= 1 && rng.bernoulli(p);
                if refresh {
                    self.snapshot = y_prev.to_vec();
                    op.eval_full_into(y_prev, &mut self.snapshot_g);
                    self.calls += n;
                }
                let idx = self.draw(b, rng)?;
                let mut at_snap = vec![0.0; self.dim];
                op.eval_batch_mean_into(&idx, y, &mut out);
                op.eval_batch_mean_into(&idx, &self.snapshot, &mut at_snap);
                // after a refresh the batch at the snapshot is part of the full pass
                self.calls += if refresh { bb } else { 2 * bb };
                linalg::axpy(-1.0, &at_snap, &mut out);
                linalg::axpy(1.0, &self.snapshot_g, &mut out);
            }
            EstimatorKind::Saga => {
                // correction against the stored rows first, then overwrite them
                let idx = self.draw(b, rng)?;
                let inv_b = 1.0 / b as f64;
                let inv_n = 1.0 / self.n as f64;
                for j in 0..self.dim {
                    out[j] = self.table_sum[j] * inv_n;
                }
                let mut fresh = Vec::with_capacity(idx.len());
                let mut row = vec![0.0; self.dim];
                for &i in &idx {
                    op.eval_component_into(i, y, &mut row);
                    let slot = &self.table[i * self.dim..(i + 1) * self.dim];
                    for j in 0..self.dim {
                        out[j] += (row[j] - slot[j]) * inv_b;
                    }
                    fresh.push((i, row.clone()));
                }
                self.calls += bb;
                for (i, row) in fresh {
                    let slot = &mut self.table[i * self.dim..(i + 1) * self.dim];
                    for j in 0..self.dim {
                        self.table_sum[j] += row[j] - slot[j];
                    }
                    slot.copy_from_slice(&row);
                }
            }
            EstimatorKind::LSarah => {
                if rng.bernoulli(p) {
                    op.eval_full_into(y, &mut out);
                    self.calls += n;
                } else {
                    let idx = self.draw(b, rng)?;
                    let mut at_prev = vec![0.0; self.dim];
                    op.eval_batch_mean_into(&idx, y, &mut out);
                    op.eval_batch_mean_into(&idx, y_prev, &mut at_prev);
                    self.calls += 2 * bb;
                    for j in 0..self.dim {
                        out[j] += self.running[j] - at_prev[j];
                    }
                }
                self.running.copy_from_slice(&out);
            }
        }
        self.k += 1;
        Ok(out)
    }

    /// The tracker `Δ` at point `y` with the current memory and the last batch
    /// size. Costs up to `2n` component evaluations that are not charged.
    ///
    /// For L-SVRG and L-SARAH, called after an estimate at `y`, this is the
    /// tracker of that estimate. For SAGA the table is refreshed after use, so
    /// the value is the tracker of the *next* estimate, should it be made at `y`.
    pub fn delta_tracker(&self, op: &dyn FiniteSumOperator, y: &[f64]) -> f64 {
        let b = self.last_batch.max(1) as f64;
        let nf = self.n as f64;
        let mut gi = vec![0.0; self.dim];
        match self.cfg.kind {
            EstimatorKind::Exact | EstimatorKind::MiniBatch => 0.0,
            EstimatorKind::LSvrg => {
                let mut gs = vec![0.0; self.dim];
                let mut acc = 0.0;
                for i in 0..self.n {
                    op.eval_component_into(i, y, &mut gi);
                    op.eval_component_into(i, &self.snapshot, &mut gs);
                    acc += linalg::dist(&gi, &gs).powi(2);
                }
                acc / (nf * b)
            }
            EstimatorKind::Saga => {
                let mut acc = 0.0;
                for i in 0..self.n {
                    op.eval_component_into(i, y, &mut gi);
                    acc += linalg::dist(&gi, self.table_row(i)).powi(2);
                }
                acc / (nf * b)
            }
            EstimatorKind::LSarah => linalg::dist(&self.running, &op.eval_full(y)).powi(2),
        }
    }

    /// Recursion constants at iteration `k`.
    pub fn vr_constants(&self, k: usize) -> Result<VrConstants> {
        let (b, p) = self.cfg.schedule.at(self.n, k, self.epoch())?;
        let (b, nf) = (b as f64, self.n as f64);
        Ok(match self.cfg.kind {
            EstimatorKind::Exact => VrConstants { kappa: 1.0, theta: 0.0, delta: 0.0, tracker: "zero" },
            EstimatorKind::MiniBatch => {
                let t = k as f64 + self.cfg.s + 1.0;
                VrConstants { kappa: 1.0, theta: 0.0, delta: self.cfg.sigma2 * t * t / b, tracker: "zero" }
            }
            EstimatorKind::LSvrg => VrConstants {
                kappa: p / 2.0,
                theta: 4.0 / (b * p),
                delta: 0.0,
                tracker: "(1/b) E_xi |G_xi y - G_xi y_snap|^2",
            },
            EstimatorKind::Saga => VrConstants {
                kappa: b / (2.0 * nf),
                theta: 5.0 * nf / (b * b),
                delta: 0.0,
                tracker: "(1/(n b)) sum_xi |G_xi y - table_xi|^2",
            },
            EstimatorKind::LSarah => VrConstants {
                kappa: p,
                theta: 1.0 / b,
                delta: 0.0,
                tracker: "|G~y - Gy|^2",
            },
        })
    }
}

/// `κ_k ≥ ηΓΘ_k/ρ_c + 2/(k+s+1)`.
pub fn check_kappa_theta(vrc: &VrConstants, eta: f64, rho_c: f64, gamma: f64, k: usize, s: f64) -> Result<bool> {
    if !(rho_c > 0.0) {
        return Err(Error::Precondition(
            "condition undefined for rho_c = 0; use the general-regime constants".into(),
        ));
    }
    Ok(vrc.kappa >= eta * gamma * vrc.theta / rho_c + 2.0 / (k as f64 + s + 1.0))
}
