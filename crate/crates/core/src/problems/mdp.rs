//! Garnet MDPs in the saddle form
//! `min_{v ∈ B⁺(0,R)} max_{μ ∈ Δ_{nm}} (1−γ̄)𝐩₀ᵀv + Σ_{s,a} μ_{sa}(r_{sa} + γ̄P_{sa}ᵀv − v_s)`.
//!
//! `x = [v; μ]` with `μ = [μ_1; …; μ_n]`, `μ_s ∈ R^m`. Component `s` is
//! `G_s x = [n(1−γ̄)𝐩_{0,s}e_s + nB_sμ_s; 0; −nr_s − nB_sᵀv; 0]` with
//! `B_s = [γ̄P_{s1} − e_s, …, γ̄P_{sm} − e_s]`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{config, Result};
use crate::linalg::{self, LinearMap, RealVec};
use crate::operator::{AssumptionMeta, FiniteSumOperator, Problem};
use crate::problems::norm::operator_norm_estimate;
use crate::problems::projection::BallSimplex;
use crate::rng::Rng;

/// How the blocks `B_s` are aggregated into `L_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockNorm {
    /// `max_s ‖B_s‖₂`.
    #[default]
    MaxBlock,
    /// `‖[B_1, …, B_n]‖₂`.
    Full,
}

#[derive(Debug, Clone)]
pub struct Mdp {
    n: usize,
    m: usize,
    nb: usize,
    pub discount: f64,
    /// `r_{sa}` at `s·m + a`.
    rewards: Vec<f64>,
    /// Support of `P_{sa}` at `(s·m + a)·nb ..`.
    next_state: Vec<u32>,
    next_prob: Vec<f64>,
    p0: Vec<f64>,
    pub r_inf: f64,
    pub radius: f64,
}

/// `n(m+1)`.
pub fn mdp_dim(n: usize, m: usize) -> usize {
    n * (m + 1)
}

impl Mdp {
    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn n_actions(&self) -> usize {
        self.m
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.m + a]
    }

    /// `(next state, probability)` pairs of `P_{sa}`.
    pub fn transitions(&self, s: usize, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = (s * self.m + a) * self.nb..(s * self.m + a + 1) * self.nb;
        self.next_state[r.clone()].iter().map(|&j| j as usize).zip(self.next_prob[r].iter().cloned())
    }

    /// `out += w · G_s x`.
    fn accumulate(&self, s: usize, w: f64, x: &[f64], out: &mut [f64]) {
        let (n, m, g) = (self.n as f64, self.m, self.discount);
        let (v, mu) = x.split_at(self.n);
        let (ov, omu) = out.split_at_mut(self.n);
        ov[s] += w * n * (1.0 - g) * self.p0[s];
        for a in 0..m {
            let mu_sa = mu[s * m + a];
            let mut pv = 0.0;
            for (j, pj) in self.transitions(s, a) {
                ov[j] += w * n * g * pj * mu_sa;
                pv += pj * v[j];
            }
            ov[s] -= w * n * mu_sa;
            omu[s * m + a] -= w * n * (self.reward(s, a) + g * pv - v[s]);
        }
    }

    /// Gram matrix `B_sᵀB_s` (m × m).
    fn block_gram(&self, s: usize, scratch: &mut [f64]) -> DMatrix<f64> {
        let (m, g) = (self.m, self.discount);
        let mut gram = DMatrix::zeros(m, m);
        for a in 0..m {
            for (j, pj) in self.transitions(s, a) {
                scratch[j] = pj;
            }
            let psa_s = scratch[s];
            for b in a..m {
                let mut inner = 0.0;
                let mut psb_s = 0.0;
                for (j, pj) in self.transitions(s, b) {
                    inner += scratch[j] * pj;
                    if j == s {
                        psb_s = pj;
                    }
                }
                let val = g * g * inner - g * psa_s - g * psb_s + 1.0;
                gram[(a, b)] = val;
                gram[(b, a)] = val;
            }
            for (j, _) in self.transitions(s, a) {
                scratch[j] = 0.0;
            }
        }
        gram
    }

    pub fn block_norm(&self, kind: BlockNorm) -> f64 {
        match kind {
            BlockNorm::MaxBlock => {
                let mut scratch = vec![0.0; self.n];
                (0..self.n)
                    .map(|s| linalg::sym_eig_extremes(&self.block_gram(s, &mut scratch)).1.max(0.0).sqrt())
                    .fold(0.0, f64::max)
            }
            BlockNorm::Full => operator_norm_estimate(&TransitionMap { mdp: self }, 2000).value,
        }
    }

    pub fn x0(&self) -> RealVec {
        let mut x = vec![(1.0 - self.discount) / self.r_inf; self.n];
        x.extend(std::iter::repeat(1.0 / (self.n * self.m) as f64).take(self.n * self.m));
        x
    }

    pub fn into_problem(self, name: &str, kind: BlockNorm) -> Problem {
        let lb = self.block_norm(kind);
        let x0 = self.x0();
        let resolvent = BallSimplex { ball_dim: self.n, radius: self.radius };
        Problem {
            name: name.to_string(),
            op: Arc::new(self),
            resolvent: Arc::new(resolvent),
            meta: AssumptionMeta::new(lb),
            x0,
            x_star: None,
        }
    }
}

/// `B = [B_1, …, B_n] : R^{nm} → R^n`.
struct TransitionMap<'a> {
    mdp: &'a Mdp,
}

impl LinearMap for TransitionMap<'_> {
    fn dim_in(&self) -> usize {
        self.mdp.n * self.mdp.m
    }
    fn dim_out(&self) -> usize {
        self.mdp.n
    }
    fn apply(&self, mu: &[f64], out: &mut [f64]) {
        let (m, g) = (self.mdp.m, self.mdp.discount);
        out.iter_mut().for_each(|o| *o = 0.0);
        for s in 0..self.mdp.n {
            for a in 0..m {
                let c = mu[s * m + a];
                for (j, pj) in self.mdp.transitions(s, a) {
                    out[j] += g * pj * c;
                }
                out[s] -= c;
            }
        }
    }
    fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        let (m, g) = (self.mdp.m, self.mdp.discount);
        for s in 0..self.mdp.n {
            for a in 0..m {
                let pv: f64 = self.mdp.transitions(s, a).map(|(j, pj)| pj * v[j]).sum();
                out[s * m + a] = g * pv - v[s];
            }
        }
    }
}

impl FiniteSumOperator for Mdp {
    fn n_components(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        mdp_dim(self.n, self.m)
    }

    fn eval_component_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        self.accumulate(i, 1.0, x, out);
    }

    fn eval_batch_mean_into(&self, idx: &[usize], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let w = 1.0 / idx.len() as f64;
        for &s in idx {
            self.accumulate(s, w, x, out);
        }
    }

    fn eval_full_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let w = 1.0 / self.n as f64;
        for s in 0..self.n {
            self.accumulate(s, w, x, out);
        }
    }
}

/// Garnet instance with `n` states, `m` actions and `nb` reachable next states
/// per pair. The initial distribution is uniform.
pub fn build_mdp(n: usize, m: usize, nb: usize, discount: f64, seed: u64) -> Result<Mdp> {
    if n == 0 || m == 0 {
        return config("need at least one state and one action");
    }
    if nb == 0 || nb > n {
        return config(format!("branching factor must lie in [1, {n}], got {nb}"));
    }
    if !(discount > 0.0 && discount < 1.0) {
        return config(format!("discount must lie in (0, 1), got {discount}"));
    }
    let mut rng = Rng::new(seed);
    let rewards: Vec<f64> = (0..n * m).map(|_| rng.uniform()).collect();
    let mut next_state = Vec::with_capacity(n * m * nb);
    let mut next_prob = Vec::with_capacity(n * m * nb);
    for _ in 0..n * m {
        let support = rng.batch_without_replacement(n, nb);
        let mass: Vec<f64> = (0..nb).map(|_| rng.uniform()).collect();
        let total: f64 = mass.iter().sum();
        next_state.extend(support.iter().map(|&j| j as u32));
        next_prob.extend(mass.iter().map(|w| w / total));
    }
    let r_inf = rewards.iter().cloned().fold(0.0, f64::max);
    let radius = (n as f64).sqrt() * r_inf / (1.0 - discount);
    Ok(Mdp {
        n,
        m,
        nb,
        discount,
        rewards,
        next_state,
        next_prob,
        p0: vec![1.0 / n as f64; n],
        r_inf,
        radius,
    })
}
