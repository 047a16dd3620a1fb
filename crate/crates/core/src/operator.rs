//! Operator abstractions for `0 ∈ Gx + Tx` with finite-sum `G` and resolvent access to `T`.

use std::sync::Arc;

use crate::error::{config, Error, Result};
use crate::linalg::{self, RealVec};

/// `G = (1/n) Σᵢ Gᵢ` over `n` components acting on `R^dim`.
///
/// Implementations must be deterministic. `eval_full` and `eval_batch_mean`
/// may use algebraic shortcuts but must agree with the component average to
/// rounding error.
pub trait FiniteSumOperator: Send + Sync {
    fn n_components(&self) -> usize;
    fn dim(&self) -> usize;

    fn eval_component_into(&self, i: usize, x: &[f64], out: &mut [f64]);

    fn eval_component(&self, i: usize, x: &[f64]) -> RealVec {
        let mut out = vec![0.0; self.dim()];
        self.eval_component_into(i, x, &mut out);
        out
    }

    /// Mean of the components indexed by `idx` (with multiplicity).
    fn eval_batch_mean_into(&self, idx: &[usize], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut tmp = vec![0.0; self.dim()];
        for &i in idx {
            self.eval_component_into(i, x, &mut tmp);
            linalg::axpy(1.0, &tmp, out);
        }
        let inv = 1.0 / idx.len() as f64;
        out.iter_mut().for_each(|o| *o *= inv);
    }

    fn eval_full_into(&self, x: &[f64], out: &mut [f64]) {
        let all: Vec<usize> = (0..self.n_components()).collect();
        self.eval_batch_mean_into(&all, x, out);
    }

    fn eval_full(&self, x: &[f64]) -> RealVec {
        let mut out = vec![0.0; self.dim()];
        self.eval_full_into(x, &mut out);
        out
    }
}

/// Resolvent access to the set-valued part `T`.
pub trait Resolvent: Send + Sync {
    /// `J_{ηT}(u) = (I + ηT)⁻¹ u`.
    fn apply(&self, eta: f64, u: &[f64]) -> RealVec;

    /// Whether `0 ∈ Tx`.
    fn contains_zero_at(&self, x: &[f64]) -> bool;

    /// True when `T = 0` and the resolvent is the identity.
    fn is_zero(&self) -> bool {
        false
    }

    /// For normal cones of a set `C`: `sup_{u ∈ C} ⟨v, u − x⟩`. This is `≤ 0`
    /// exactly when `v ∈ N_C(x)`. `None` when `T` is not a normal cone.
    fn normal_cone_gap(&self, _x: &[f64], _v: &[f64]) -> Option<f64> {
        None
    }
}

/// `T = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroResolvent;

impl Resolvent for ZeroResolvent {
    fn apply(&self, _eta: f64, u: &[f64]) -> RealVec {
        u.to_vec()
    }
    fn contains_zero_at(&self, _x: &[f64]) -> bool {
        true
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// Assumption constants attached to a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionMeta {
    /// Lipschitz-type constant.
    pub lipschitz: f64,
    /// Mixing weight between the mean and the expected-component Lipschitz bounds.
    pub alpha: f64,
    pub rho_n: f64,
    pub rho_c: f64,
    /// Weak-Minty constant.
    pub rho_star: f64,
    /// Oracle variance bound σ².
    pub sigma2: f64,
}

impl AssumptionMeta {
    pub fn new(lipschitz: f64) -> Self {
        Self { lipschitz, alpha: 1.0, rho_n: 0.0, rho_c: 0.0, rho_star: 0.0, sigma2: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return config(format!("Lipschitz constant must be positive, got {}", self.lipschitz));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return config(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.rho_c >= 0.0 && self.rho_n >= self.rho_c) {
            return config(format!(
                "need rho_n >= rho_c >= 0, got rho_n = {}, rho_c = {}",
                self.rho_n, self.rho_c
            ));
        }
        if self.rho_star < 0.0 || self.sigma2 < 0.0 {
            return config("rho_star and sigma2 must be nonnegative");
        }
        Ok(())
    }
}

/// A problem instance: operator, resolvent, metadata and a feasible start.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub op: Arc<dyn FiniteSumOperator>,
    pub resolvent: Arc<dyn Resolvent>,
    pub meta: AssumptionMeta,
    pub x0: RealVec,
    /// A known solution, when one is available.
    pub x_star: Option<RealVec>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.op.n_components())
            .field("dim", &self.op.dim())
            .field("meta", &self.meta)
            .finish()
    }
}

impl Problem {
    pub fn n(&self) -> usize {
        self.op.n_components()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// `‖Gx + v‖₂`, one full operator pass.
pub fn natural_residual(op: &dyn FiniteSumOperator, x: &[f64], v: &[f64]) -> Result<f64> {
    linalg::ensure_dim(x, op.dim())?;
    linalg::ensure_dim(v, op.dim())?;
    linalg::ensure_finite(x)?;
    linalg::ensure_finite(v)?;
    let mut g = op.eval_full(x);
    linalg::axpy(1.0, v, &mut g);
    let r = linalg::norm(&g);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::NonFinite)
    }
}

/// Forward-backward residual `‖x − J_{λT}(x − λGx)‖ / λ`.
pub fn fb_residual(
    op: &dyn FiniteSumOperator,
    resolvent: &dyn Resolvent,
    x: &[f64],
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return config(format!("lambda must be positive, got {lambda}"));
    }
    linalg::ensure_dim(x, op.dim())?;
    linalg::ensure_finite(x)?;
    let g = op.eval_full(x);
    let mut u = x.to_vec();
    linalg::axpy(-lambda, &g, &mut u);
    let p = resolvent.apply(lambda, &u);
    let r = linalg::dist(x, &p) / lambda;
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::NonFinite)
    }
}
