//! Stochastic bilinear matrix game `min_{u∈Δ} max_{v∈Δ} ⟨𝐋u, v⟩` with
//! `𝐋 = (1/n)Σ𝐋⁽ⁱ⁾`, `𝐋⁽ⁱ⁾_{jk} = ŵ⁽ⁱ⁾_j (1 − exp(−θ|j−k|))`.

use std::sync::Arc;

use crate::linalg::{LinearMap, RealVec};
use crate::operator::{AssumptionMeta, FiniteSumOperator, Problem};
use crate::problems::norm::operator_norm_estimate;
use crate::problems::projection::SimplexProduct;
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub struct MatrixGame {
    n: usize,
    p1: usize,
    pub theta: f64,
    /// `ŵ⁽ⁱ⁾`, row-major `n × p1`.
    weights: Vec<f64>,
    mean_weights: Vec<f64>,
    /// `D_{jk} = 1 − exp(−θ|j−k|)`, symmetric, row-major.
    kernel: Vec<f64>,
}

impl MatrixGame {
    pub fn p1(&self) -> usize {
        self.p1
    }

    /// Payoff entry `𝐋⁽ⁱ⁾_{jk}`, or the averaged entry when `i` is `None`.
    pub fn payoff(&self, i: Option<usize>, j: usize, k: usize) -> f64 {
        let w = match i {
            Some(i) => self.weights[i * self.p1 + j],
            None => self.mean_weights[j],
        };
        w * self.kernel[j * self.p1 + k]
    }

    fn kernel_mul(&self, x: &[f64], out: &mut [f64]) {
        let p1 = self.p1;
        for j in 0..p1 {
            let row = &self.kernel[j * p1..(j + 1) * p1];
            out[j] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `[𝐋ᵀv; −𝐋u]` with `𝐋 = diag(w)D`.
    fn apply_weighted(&self, w: &[f64], x: &[f64], out: &mut [f64]) {
        let p1 = self.p1;
        let (u, v) = x.split_at(p1);
        let (ou, ov) = out.split_at_mut(p1);
        // 𝐋ᵀv = D(w∘v) since D is symmetric
        let wv: Vec<f64> = w.iter().zip(v).map(|(a, b)| a * b).collect();
        self.kernel_mul(&wv, ou);
        self.kernel_mul(u, ov);
        ov.iter_mut().zip(w).for_each(|(o, &wi)| *o *= -wi);
    }

    /// The averaged operator matrix as a linear map (skew-symmetric).
    pub fn averaged_map(&self) -> AveragedGame<'_> {
        AveragedGame { game: self }
    }

    pub fn x0(&self) -> RealVec {
        vec![1.0 / self.p1 as f64; 2 * self.p1]
    }

    pub fn into_problem(self, name: &str) -> Problem {
        let est = operator_norm_estimate(&self.averaged_map(), 10_000);
        let x0 = self.x0();
        let p1 = self.p1;
        Problem {
            name: name.to_string(),
            op: Arc::new(self),
            resolvent: Arc::new(SimplexProduct::new(vec![p1, p1])),
            meta: AssumptionMeta::new(est.value),
            x0,
            x_star: None,
        }
    }
}

pub struct AveragedGame<'a> {
    game: &'a MatrixGame,
}

impl LinearMap for AveragedGame<'_> {
    fn dim_in(&self) -> usize {
        2 * self.game.p1
    }
    fn dim_out(&self) -> usize {
        2 * self.game.p1
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.game.apply_weighted(&self.game.mean_weights, x, out);
    }
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.apply(y, out);
        out.iter_mut().for_each(|o| *o = -*o);
    }
}

impl FiniteSumOperator for MatrixGame {
    fn n_components(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        2 * self.p1
    }

    fn eval_component_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let w = &self.weights[i * self.p1..(i + 1) * self.p1];
        self.apply_weighted(w, x, out);
    }

    // linear in ŵ, so a batch mean is one product with the averaged weights
    fn eval_batch_mean_into(&self, idx: &[usize], x: &[f64], out: &mut [f64]) {
        let mut w = vec![0.0; self.p1];
        for &i in idx {
            let row = &self.weights[i * self.p1..(i + 1) * self.p1];
            w.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        let inv = 1.0 / idx.len() as f64;
        w.iter_mut().for_each(|a| *a *= inv);
        self.apply_weighted(&w, x, out);
    }

    fn eval_full_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply_weighted(&self.mean_weights, x, out);
    }
}

/// `p1 = m²` pure strategies per player, `n` noisy payoff samples.
pub fn build_matrix_game(m: usize, n: usize, theta: f64, noise_sigma2: f64, seed: u64) -> MatrixGame {
    assert!(m >= 1 && n >= 1, "need m >= 1 and n >= 1");
    let p1 = m * m;
    let mut rng = Rng::new(seed);
    let base: Vec<f64> = (0..p1).map(|_| rng.normal().abs()).collect();
    let sd = noise_sigma2.sqrt();
    let mut weights = Vec::with_capacity(n * p1);
    for _ in 0..n {
        for &b in &base {
            weights.push((b + sd * rng.normal()).abs());
        }
    }
    let mut mean_weights = vec![0.0; p1];
    for i in 0..n {
        for j in 0..p1 {
            mean_weights[j] += weights[i * p1 + j];
        }
    }
    mean_weights.iter_mut().for_each(|w| *w /= n as f64);
    let mut kernel = vec![0.0; p1 * p1];
    for j in 0..p1 {
        for k in 0..p1 {
            kernel[j * p1 + k] = 1.0 - (-theta * (j as f64 - k as f64).abs()).exp();
        }
    }
    MatrixGame { n, p1, theta, weights, mean_weights, kernel }
}
