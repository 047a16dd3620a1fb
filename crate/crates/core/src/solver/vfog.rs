//! One iteration of the accelerated optimistic-gradient scheme in resolvent form:
//!
//! ```text
//! x̂      = (s/t_k) z + ((t_k − s)/t_k) x
//! d      = G̃y^{k−1} + v
//! y      = x̂ − (η − β_k) d
//! u      = x̂ − η G̃y + β_k d
//! x⁺     = J_{ηT}(u)
//! z⁺     = z − (γ_k/s) d
//! v⁺     = (x̂ − x⁺ + β_k d)/η − G̃y
//! ```

use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::linalg::{self, RealVec};
use crate::operator::Problem;
use crate::rng::Rng;
use crate::solver::params::ScheduleParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: RealVec,
    pub y_prev: RealVec,
    pub z: RealVec,
    pub v: RealVec,
    /// `G̃y^{k−1}`.
    pub g_prev: RealVec,
    pub k: usize,
}

/// `z⁰ = y⁻¹ = x⁰`, `v⁰ = 0` and `G̃y⁻¹ = Gx⁰` from one full pass.
pub fn vfog_init(problem: &Problem, x0: &[f64], params: &ScheduleParams, estimator: &mut Estimator) -> Result<SolverState> {
    params.validate()?;
    linalg::ensure_dim(x0, problem.dim())?;
    linalg::ensure_finite(x0)?;
    if !problem.resolvent.contains_zero_at(x0) {
        return Err(Error::Infeasible("0 is not in T(x0); start from a feasible point".into()));
    }
    let g = estimator.init_full_pass(problem.op.as_ref(), x0);
    Ok(SolverState {
        x: x0.to_vec(),
        y_prev: x0.to_vec(),
        z: x0.to_vec(),
        v: vec![0.0; x0.len()],
        g_prev: g,
        k: 0,
    })
}

pub fn vfog_step(
    state: &mut SolverState,
    estimator: &mut Estimator,
    problem: &Problem,
    params: &ScheduleParams,
    rng: &mut Rng,
) -> Result<()> {
    let k = state.k;
    let (s, eta) = (params.s, params.eta);
    let t = params.t(k);
    let beta = params.beta(k);
    let gamma = params.gamma(k);
    if beta < 0.0 && k == 0 {
        log::debug!("beta_0 = {beta} is negative; applied as is");
    }
    let p = state.x.len();
    let mut xh = vec![0.0; p];
    let mut d = vec![0.0; p];
    let mut y = vec![0.0; p];
    for i in 0..p {
        xh[i] = (s / t) * state.z[i] + ((t - s) / t) * state.x[i];
        d[i] = state.g_prev[i] + state.v[i];
        y[i] = xh[i] - (eta - beta) * d[i];
    }
    let g = estimator.estimate(problem.op.as_ref(), &y, &state.y_prev, rng)?;
    let mut u = vec![0.0; p];
    for i in 0..p {
        u[i] = xh[i] - eta * g[i] + beta * d[i];
    }
    let x_new = if problem.resolvent.is_zero() { u.clone() } else { problem.resolvent.apply(eta, &u) };
    if !linalg::is_finite(&x_new) {
        return Err(Error::NonFinite);
    }
    for i in 0..p {
        state.z[i] -= (gamma / s) * d[i];
        state.v[i] = if problem.resolvent.is_zero() { 0.0 } else { (u[i] - x_new[i]) / eta };
    }
    state.x = x_new;
    state.y_prev = y;
    state.g_prev = g;
    state.k += 1;
    Ok(())
}
