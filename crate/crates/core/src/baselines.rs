//! Non-accelerated comparison methods.
//!
//! Past extragradient (PEG/OG), one full pass per step:
//! ```text
//! y  = J(x − η G y_prev)
//! x⁺ = J(x − η G y)
//! ```
//!
//! Loopless-SVRG extragradient (VrEG) with anchor weight `α = 1 − p`:
//! ```text
//! x̄  = α x + (1 − α) w
//! x½ = J(x̄ − τ G w)
//! x⁺ = J(x̄ − τ [G w + G_B x½ − G_B w])
//! w  ← x⁺ with probability p (one full pass for G w)
//! ```
//!
//! Loopless-SVRG forward-reflected-backward (VrFRBS):
//! ```text
//! x⁺ = J(x − τ [G w_k + G_B x − G_B w_{k−1}])
//! w_{k+1} = x⁺ with probability p, else w_k
//! ```
//!
//! In all three `v⁺ = (u − x⁺)/τ` for the resolvent argument `u`, so `v⁺ ∈ Tx⁺`.

use crate::error::{config, Error, Result};
use crate::linalg::{self, RealVec};
use crate::operator::Problem;
use crate::rng::Rng;

/// `η = 0.95·√p / L` (from `0.95√(1−α)/L` with `α = 1 − p`).
pub fn vreg_stepsize(p: f64, lipschitz: f64) -> f64 {
    0.95 * p.sqrt() / lipschitz
}

/// `η = 0.95(1 − √(1−p)) / (2L)`.
pub fn vrfrbs_stepsize(p: f64, lipschitz: f64) -> f64 {
    0.95 * (1.0 - (1.0 - p).sqrt()) / (2.0 * lipschitz)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    Peg,
    VrEg,
    VrFrbs,
}

#[derive(Debug, Clone)]
pub struct BaselineState {
    pub kind: BaselineKind,
    pub x: RealVec,
    pub v: RealVec,
    /// PEG: `y^{k−1}`; VrFRBS: `w_{k−1}`.
    pub y_prev: RealVec,
    /// PEG: `G y^{k−1}`.
    pub g_prev: RealVec,
    /// Snapshot `w` and its full operator value.
    pub w: RealVec,
    pub gw: RealVec,
    pub k: usize,
    pub oracle_calls: u64,
}

fn resolve(problem: &Problem, eta: f64, u: &[f64]) -> RealVec {
    if problem.resolvent.is_zero() {
        u.to_vec()
    } else {
        problem.resolvent.apply(eta, u)
    }
}

/// `G_B z` for every point in `pts`; `b = n` uses the full sum.
fn batch_means(problem: &Problem, b: usize, pts: &[&[f64]], rng: &mut Rng) -> Vec<RealVec> {
    let dim = problem.dim();
    if b == problem.n() {
        return pts.iter().map(|z| problem.op.eval_full(z)).collect();
    }
    let idx = rng.batch_with_replacement(problem.n(), b);
    pts.iter()
        .map(|z| {
            let mut out = vec![0.0; dim];
            problem.op.eval_batch_mean_into(&idx, z, &mut out);
            out
        })
        .collect()
}

fn check(problem: &Problem, p: f64, b: usize) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return config(format!("probability must lie in (0, 1], got {p}"));
    }
    if b == 0 || b > problem.n() {
        return config(format!("batch size must lie in [1, {}], got {b}", problem.n()));
    }
    Ok(())
}

impl BaselineState {
    /// One full pass at `x0`.
    pub fn init(kind: BaselineKind, problem: &Problem, x0: &[f64]) -> Result<Self> {
        linalg::ensure_dim(x0, problem.dim())?;
        linalg::ensure_finite(x0)?;
        if !problem.resolvent.contains_zero_at(x0) {
            return Err(Error::Infeasible("0 is not in T(x0); start from a feasible point".into()));
        }
        let g = problem.op.eval_full(x0);
        Ok(Self {
            kind,
            x: x0.to_vec(),
            v: vec![0.0; x0.len()],
            y_prev: x0.to_vec(),
            g_prev: g.clone(),
            w: x0.to_vec(),
            gw: g,
            k: 0,
            oracle_calls: problem.n() as u64,
        })
    }

    fn finish(&mut self, problem: &Problem, eta: f64, u: &[f64]) -> Result<()> {
        let x_new = resolve(problem, eta, u);
        if !linalg::is_finite(&x_new) {
            return Err(Error::NonFinite);
        }
        for i in 0..u.len() {
            self.v[i] = if problem.resolvent.is_zero() { 0.0 } else { (u[i] - x_new[i]) / eta };
        }
        self.x = x_new;
        self.k += 1;
        Ok(())
    }
}

pub fn peg_step(state: &mut BaselineState, problem: &Problem, eta: f64) -> Result<()> {
    if !(eta > 0.0) {
        return config(format!("eta must be positive, got {eta}"));
    }
    let mut u = state.x.clone();
    linalg::axpy(-eta, &state.g_prev, &mut u);
    let y = resolve(problem, eta, &u);
    let gy = problem.op.eval_full(&y);
    state.oracle_calls += problem.n() as u64;
    let mut u = state.x.clone();
    linalg::axpy(-eta, &gy, &mut u);
    state.y_prev = y;
    state.g_prev = gy;
    state.finish(problem, eta, &u)
}

fn refresh(state: &mut BaselineState, problem: &Problem, p: f64, rng: &mut Rng) {
    if rng.bernoulli(p) {
        state.w = state.x.clone();
        state.gw = problem.op.eval_full(&state.w);
        state.oracle_calls += problem.n() as u64;
    }
}

pub fn vreg_step(state: &mut BaselineState, problem: &Problem, eta: f64, p: f64, b: usize, rng: &mut Rng) -> Result<()> {
    check(problem, p, b)?;
    let alpha = 1.0 - p;
    let dim = state.x.len();
    let xbar: RealVec = (0..dim).map(|i| alpha * state.x[i] + (1.0 - alpha) * state.w[i]).collect();
    let mut u = xbar.clone();
    linalg::axpy(-eta, &state.gw, &mut u);
    let xh = resolve(problem, eta, &u);
    let g = batch_means(problem, b, &[&xh, &state.w], rng);
    let (at_half, at_w) = (&g[0], &g[1]);
    state.oracle_calls += 2 * b as u64;
    let mut u = xbar;
    for i in 0..dim {
        u[i] -= eta * (state.gw[i] + at_half[i] - at_w[i]);
    }
    state.finish(problem, eta, &u)?;
    refresh(state, problem, p, rng);
    Ok(())
}

pub fn vrfrbs_step(state: &mut BaselineState, problem: &Problem, eta: f64, p: f64, b: usize, rng: &mut Rng) -> Result<()> {
    check(problem, p, b)?;
    let dim = state.x.len();
    let g = batch_means(problem, b, &[&state.x, &state.y_prev], rng);
    let (at_x, at_wprev) = (&g[0], &g[1]);
    state.oracle_calls += 2 * b as u64;
    let mut u = state.x.clone();
    for i in 0..dim {
        u[i] -= eta * (state.gw[i] + at_x[i] - at_wprev[i]);
    }
    state.y_prev = state.w.clone();
    state.finish(problem, eta, &u)?;
    refresh(state, problem, p, rng);
    Ok(())
}
