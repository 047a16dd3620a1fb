//! Run loop: budgets, out-of-band residual probes and trace recording.

use std::time::Instant;

use crate::baselines::{peg_step, vreg_step, vrfrbs_step, BaselineKind, BaselineState};
use crate::error::{config, Error, Result};
use crate::estimators::{Estimator, EstimatorConfig};
use crate::operator::{fb_residual, natural_residual, Problem};
use crate::rng::Rng;
use crate::solver::params::ScheduleParams;
use crate::solver::vfog::{vfog_init, vfog_step, SolverState};

/// Squared residual above which a run counts as diverged.
pub const DIVERGENCE_SQ: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub enum AlgoConfig {
    Vfog { params: ScheduleParams, estimator: EstimatorConfig },
    Peg { eta: f64 },
    VrEg { eta: f64, p: f64, b: usize },
    VrFrbs { eta: f64, p: f64, b: usize },
}

/// Stops at whichever bound is hit first; at least one of the two caps is required.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Budget {
    pub max_epochs: Option<f64>,
    pub max_iterations: Option<usize>,
    pub target_residual: Option<f64>,
}

impl Budget {
    pub fn epochs(e: f64) -> Self {
        Self { max_epochs: Some(e), ..Self::default() }
    }

    pub fn iterations(k: usize) -> Self {
        Self { max_iterations: Some(k), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeCadence {
    /// Probe whenever the oracle counter crosses another multiple of `f·n`.
    EpochFraction(f64),
    EveryIterations(usize),
    /// Only the initial and final iterates.
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub probe: ProbeCadence,
    /// Fill `wallclock_ns`; off by default so traces are reproducible byte for byte.
    pub timing: bool,
    /// `λ` for the forward-backward residual; the method's stepsize when `None`.
    pub fb_lambda: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { probe: ProbeCadence::EpochFraction(1.0), timing: false, fb_lambda: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub oracle_calls: u64,
    pub epoch: f64,
    pub residual_sq: f64,
    pub fb_residual_sq: f64,
    pub wallclock_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub failed: bool,
    pub failure: Option<String>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }
}

/// A steppable algorithm exposing the pair `(x, v)` with `v ∈ Tx`.
pub trait Method {
    fn step(&mut self, rng: &mut Rng) -> Result<()>;
    fn iteration(&self) -> usize;
    fn oracle_calls(&self) -> u64;
    fn x(&self) -> &[f64];
    fn v(&self) -> &[f64];
    fn stepsize(&self) -> f64;
}

pub struct VfogMethod {
    pub problem: Problem,
    pub params: ScheduleParams,
    pub estimator: Estimator,
    pub state: SolverState,
}

impl VfogMethod {
    pub fn new(problem: &Problem, params: ScheduleParams, cfg: EstimatorConfig) -> Result<Self> {
        let mut estimator = Estimator::new(cfg, problem.op.as_ref());
        let state = vfog_init(problem, &problem.x0, &params, &mut estimator)?;
        Ok(Self { problem: problem.clone(), params, estimator, state })
    }
}

impl Method for VfogMethod {
    fn step(&mut self, rng: &mut Rng) -> Result<()> {
        vfog_step(&mut self.state, &mut self.estimator, &self.problem, &self.params, rng)
    }
    fn iteration(&self) -> usize {
        self.state.k
    }
    fn oracle_calls(&self) -> u64 {
        self.estimator.oracle_calls()
    }
    fn x(&self) -> &[f64] {
        &self.state.x
    }
    fn v(&self) -> &[f64] {
        &self.state.v
    }
    fn stepsize(&self) -> f64 {
        self.params.eta
    }
}

pub struct BaselineMethod {
    pub problem: Problem,
    pub state: BaselineState,
    pub eta: f64,
    pub p: f64,
    pub b: usize,
}

impl Method for BaselineMethod {
    fn step(&mut self, rng: &mut Rng) -> Result<()> {
        match self.state.kind {
            BaselineKind::Peg => peg_step(&mut self.state, &self.problem, self.eta),
            BaselineKind::VrEg => vreg_step(&mut self.state, &self.problem, self.eta, self.p, self.b, rng),
            BaselineKind::VrFrbs => vrfrbs_step(&mut self.state, &self.problem, self.eta, self.p, self.b, rng),
        }
    }
    fn iteration(&self) -> usize {
        self.state.k
    }
    fn oracle_calls(&self) -> u64 {
        self.state.oracle_calls
    }
    fn x(&self) -> &[f64] {
        &self.state.x
    }
    fn v(&self) -> &[f64] {
        &self.state.v
    }
    fn stepsize(&self) -> f64 {
        self.eta
    }
}

pub fn build_method(problem: &Problem, cfg: &AlgoConfig) -> Result<Box<dyn Method>> {
    let baseline = |kind, eta: f64, p, b| -> Result<Box<dyn Method>> {
        if !(eta > 0.0) {
            return config(format!("eta must be positive, got {eta}"));
        }
        let state = BaselineState::init(kind, problem, &problem.x0)?;
        Ok(Box::new(BaselineMethod { problem: problem.clone(), state, eta, p, b }))
    };
    match cfg {
        AlgoConfig::Vfog { params, estimator } => {
            params.check_stepsize(problem.meta.lipschitz, f64::INFINITY);
            Ok(Box::new(VfogMethod::new(problem, *params, estimator.clone())?))
        }
        AlgoConfig::Peg { eta } => baseline(BaselineKind::Peg, *eta, 1.0, problem.n()),
        AlgoConfig::VrEg { eta, p, b } => baseline(BaselineKind::VrEg, *eta, *p, *b),
        AlgoConfig::VrFrbs { eta, p, b } => baseline(BaselineKind::VrFrbs, *eta, *p, *b),
    }
}

fn probe(problem: &Problem, m: &dyn Method, lambda: f64, started: Option<&Instant>) -> Result<TraceRecord> {
    let r = natural_residual(problem.op.as_ref(), m.x(), m.v())?;
    let fb = fb_residual(problem.op.as_ref(), problem.resolvent.as_ref(), m.x(), lambda)?;
    let calls = m.oracle_calls();
    Ok(TraceRecord {
        k: m.iteration(),
        oracle_calls: calls,
        epoch: calls as f64 / problem.n() as f64,
        residual_sq: r * r,
        fb_residual_sq: fb * fb,
        wallclock_ns: started.map_or(0, |t| t.elapsed().as_nanos() as u64),
    })
}

/// Drive an already initialised method until the budget is exhausted.
pub fn run_method(problem: &Problem, method: &mut dyn Method, budget: &Budget, opts: &RunOptions, rng: &mut Rng) -> Result<RunTrace> {
    if budget.max_epochs.is_none() && budget.max_iterations.is_none() {
        return config("budget needs max_epochs or max_iterations");
    }
    let started = opts.timing.then(Instant::now);
    let n = problem.n() as f64;
    let lambda = opts.fb_lambda.unwrap_or_else(|| method.stepsize());
    let mut trace = RunTrace::default();
    let mut next_calls = match opts.probe {
        ProbeCadence::EpochFraction(f) => {
            if !(f > 0.0) {
                return config("probe fraction must be positive");
            }
            method.oracle_calls() as f64 + f * n
        }
        _ => f64::INFINITY,
    };
    let done = |m: &dyn Method, res_sq: f64| {
        budget.max_epochs.is_some_and(|e| m.oracle_calls() as f64 >= e * n)
            || budget.max_iterations.is_some_and(|k| m.iteration() >= k)
            || budget.target_residual.is_some_and(|t| res_sq <= t * t)
    };
    let mut rec = probe(problem, method, lambda, started.as_ref())?;
    trace.records.push(rec);
    let mut last_res_sq = rec.residual_sq;
    while !done(method, last_res_sq) {
        if let Err(e) = method.step(rng) {
            match e {
                Error::NonFinite => {
                    trace.failed = true;
                    trace.failure = Some("non-finite iterate".into());
                    return Ok(trace);
                }
                other => return Err(other),
            }
        }
        let k = method.iteration();
        let calls = method.oracle_calls() as f64;
        let due = match opts.probe {
            ProbeCadence::EpochFraction(f) => {
                let hit = calls >= next_calls;
                while next_calls <= calls {
                    next_calls += f * n;
                }
                hit
            }
            ProbeCadence::EveryIterations(every) => every > 0 && k % every == 0,
            ProbeCadence::Never => false,
        };
        let stop_next = budget.max_epochs.is_some_and(|e| calls >= e * n)
            || budget.max_iterations.is_some_and(|m| k >= m);
        if due || stop_next || budget.target_residual.is_some() {
            match probe(problem, method, lambda, started.as_ref()) {
                Ok(r) => rec = r,
                Err(Error::NonFinite) => {
                    trace.failed = true;
                    trace.failure = Some("non-finite residual".into());
                    return Ok(trace);
                }
                Err(e) => return Err(e),
            }
            last_res_sq = rec.residual_sq;
            if rec.residual_sq > DIVERGENCE_SQ {
                trace.failed = true;
                trace.failure = Some(format!("diverged at k = {k}: residual^2 = {:e}", rec.residual_sq));
                return Ok(trace);
            }
            if due || stop_next || done(method, last_res_sq) {
                trace.records.push(rec);
            }
        }
    }
    Ok(trace)
}

/// Build, initialise and run `cfg` on `problem`; sampling uses `seed`.
pub fn run(problem: &Problem, cfg: &AlgoConfig, budget: &Budget, opts: &RunOptions, seed: u64) -> Result<RunTrace> {
    let mut method = build_method(problem, cfg)?;
    let mut rng = Rng::with_stream(seed, 1);
    run_method(problem, method.as_mut(), budget, opts, &mut rng)
}

/// Least-squares slope of `ln(residual²)` against `ln k` over `k ∈ [k_lo, k_hi]`.
pub fn rate_certificate(trace: &RunTrace, k_lo: usize, k_hi: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = trace
        .records
        .iter()
        .filter(|r| r.k >= k_lo.max(1) && r.k <= k_hi && r.residual_sq > 0.0 && r.residual_sq.is_finite())
        .map(|r| ((r.k as f64).ln(), r.residual_sq.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Numeric(format!("need at least 10 positive records in range, got {}", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
