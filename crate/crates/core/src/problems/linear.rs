//! Affine finite-sum operators `Gᵢx = 𝐆ᵢx + 𝐠ᵢ`, optionally with a linear `T`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{config, Error, Result};
use crate::linalg::{self, RealVec};
use crate::operator::{AssumptionMeta, FiniteSumOperator, Problem, Resolvent, ZeroResolvent};
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub struct LinearProblem {
    pub components: Vec<DMatrix<f64>>,
    pub offsets: Vec<DVector<f64>>,
    /// Linear `T = Ĝ`, if any.
    pub t_matrix: Option<DMatrix<f64>>,
    pub x0: RealVec,
    pub x_star: Option<RealVec>,
    mean_matrix: DMatrix<f64>,
    mean_offset: DVector<f64>,
}

impl LinearProblem {
    pub fn new(
        components: Vec<DMatrix<f64>>,
        offsets: Vec<DVector<f64>>,
        t_matrix: Option<DMatrix<f64>>,
        x0: RealVec,
    ) -> Result<Self> {
        if components.is_empty() || components.len() != offsets.len() {
            return config("need as many offsets as component matrices, at least one");
        }
        let p = components[0].nrows();
        for (g, o) in components.iter().zip(&offsets) {
            if g.nrows() != p || g.ncols() != p {
                return Err(Error::Dimension { expected: p, got: g.ncols() });
            }
            if o.len() != p {
                return Err(Error::Dimension { expected: p, got: o.len() });
            }
        }
        if let Some(t) = &t_matrix {
            if t.nrows() != p || t.ncols() != p {
                return Err(Error::Dimension { expected: p, got: t.ncols() });
            }
        }
        linalg::ensure_dim(&x0, p)?;
        let n = components.len() as f64;
        let mut mean_matrix = DMatrix::zeros(p, p);
        let mut mean_offset = DVector::zeros(p);
        for (g, o) in components.iter().zip(&offsets) {
            mean_matrix += g;
            mean_offset += o;
        }
        mean_matrix /= n;
        mean_offset /= n;
        Ok(Self { components, offsets, t_matrix, x0, x_star: None, mean_matrix, mean_offset })
    }

    pub fn mean_matrix(&self) -> &DMatrix<f64> {
        &self.mean_matrix
    }

    pub fn mean_offset(&self) -> &DVector<f64> {
        &self.mean_offset
    }

    /// `Φ = 𝐆 + Ĝ`, the matrix of the full operator `G + T`.
    pub fn phi(&self) -> DMatrix<f64> {
        match &self.t_matrix {
            Some(t) => &self.mean_matrix + t,
            None => self.mean_matrix.clone(),
        }
    }

    /// Solve `Φx = −𝐠`.
    pub fn solve_zero(&self) -> Option<RealVec> {
        let rhs = -&self.mean_offset;
        self.phi().lu().solve(&rhs).map(|v| v.as_slice().to_vec())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let comps = self.components.iter().map(|g| g * c).collect();
        let offs = self.offsets.iter().map(|o| o * c).collect();
        let t = self.t_matrix.as_ref().map(|t| t * c);
        Self::new(comps, offs, t, self.x0.clone()).expect("scaling preserves shapes")
    }

    pub fn into_problem(self, name: &str) -> Problem {
        let lipschitz = lipschitz_bound_linear(&self, 1.0).max(f64::MIN_POSITIVE);
        let resolvent: Arc<dyn Resolvent> = match &self.t_matrix {
            Some(t) => Arc::new(LinearResolvent { t: t.clone() }),
            None => Arc::new(ZeroResolvent),
        };
        let x0 = self.x0.clone();
        let x_star = self.x_star.clone();
        Problem {
            name: name.to_string(),
            op: Arc::new(self),
            resolvent,
            meta: AssumptionMeta::new(lipschitz),
            x0,
            x_star,
        }
    }
}

impl FiniteSumOperator for LinearProblem {
    fn n_components(&self) -> usize {
        self.components.len()
    }

    fn dim(&self) -> usize {
        self.mean_offset.len()
    }

    fn eval_component_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let g = &self.components[i];
        let o = &self.offsets[i];
        let p = o.len();
        for r in 0..p {
            let mut acc = o[r];
            for c in 0..p {
                acc += g[(r, c)] * x[c];
            }
            out[r] = acc;
        }
    }
}

/// `J_{ηT}(u) = (I + ηĜ)⁻¹u` for a linear monotone `T = Ĝ`.
#[derive(Debug, Clone)]
pub struct LinearResolvent {
    pub t: DMatrix<f64>,
}

impl Resolvent for LinearResolvent {
    fn apply(&self, eta: f64, u: &[f64]) -> RealVec {
        let p = u.len();
        let m = DMatrix::identity(p, p) + &self.t * eta;
        let rhs = DVector::from_column_slice(u);
        m.lu().solve(&rhs).expect("I + ηĜ is invertible for monotone Ĝ").as_slice().to_vec()
    }

    fn contains_zero_at(&self, x: &[f64]) -> bool {
        let tx = &self.t * DVector::from_column_slice(x);
        tx.norm() <= 1e-14
    }
}

/// The two-component nonmonotone example with `Φ = diag(−1, 1)`.
///
/// `𝐆₁ = diag(−2, 0)`, `𝐆₂ = diag(0, 1)`, `Ĝ = diag(0, 1/2)`,
/// `𝐠₁ = (0, 1)`, `𝐠₂ = (−1, 1)`.
pub fn build_linear_example1() -> LinearProblem {
    let comps = vec![
        DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
    ];
    let offs = vec![DVector::from_vec(vec![0.0, 1.0]), DVector::from_vec(vec![-1.0, 1.0])];
    let t = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.5]);
    // x0 = (1, 0) has Ĝx0 = 0, so v⁰ = 0 is admissible
    let mut lp = LinearProblem::new(comps, offs, Some(t), vec![1.0, 0.0]).expect("fixed shapes");
    lp.x_star = lp.solve_zero();
    lp
}

/// `n` copies of the identity with zero offsets.
pub fn build_linear_identity(p: usize, n: usize) -> LinearProblem {
    let comps = vec![DMatrix::identity(p, p); n];
    let offs = vec![DVector::zeros(p); n];
    let mut lp = LinearProblem::new(comps, offs, None, vec![1.0; p]).expect("fixed shapes");
    lp.x_star = Some(vec![0.0; p]);
    lp
}

/// Random monotone affine finite sum with `T = 0` and known solution.
///
/// The mean matrix is `K + P` with `K` skew and `P = BBᵀ/p` small PSD; the
/// components add centred perturbations of relative size `spread`.
pub fn build_linear_random(p: usize, n: usize, spread: f64, seed: u64) -> LinearProblem {
    let mut rng = Rng::new(seed);
    let a = DMatrix::from_fn(p, p, |_, _| rng.normal());
    let skew = (&a - a.transpose()) * (0.5 / (p as f64).sqrt());
    let r = (p / 5).max(1);
    let b = DMatrix::from_fn(p, r, |_, _| rng.normal());
    let psd = &b * b.transpose() * (0.1 / p as f64);
    let mean = skew + psd;
    let mut perts: Vec<DMatrix<f64>> = (0..n)
        .map(|_| DMatrix::from_fn(p, p, |_, _| rng.normal()) * (spread / (p as f64).sqrt()))
        .collect();
    let avg = perts.iter().fold(DMatrix::zeros(p, p), |acc, e| acc + e) / n as f64;
    perts.iter_mut().for_each(|e| *e -= &avg);
    let x_star = DVector::from_fn(p, |_, _| rng.normal());
    let x0: RealVec = (0..p).map(|_| rng.normal()).collect();
    let comps: Vec<DMatrix<f64>> = perts.into_iter().map(|e| &mean + e).collect();
    let offs = comps.iter().map(|g| -(g * &x_star)).collect();
    let mut lp = LinearProblem::new(comps, offs, None, x0).expect("consistent shapes");
    lp.x_star = Some(x_star.as_slice().to_vec());
    lp
}

/// Smallest `L` with `L² = λ_max(α𝐆ᵀ𝐆 + ((1−α)/n)Σ𝐆ᵢᵀ𝐆ᵢ)`.
pub fn lipschitz_bound_linear(problem: &LinearProblem, alpha: f64) -> f64 {
    let g = problem.mean_matrix();
    let mut m = g.transpose() * g * alpha;
    if alpha < 1.0 {
        let n = problem.components.len() as f64;
        for gi in &problem.components {
            m += gi.transpose() * gi * ((1.0 - alpha) / n);
        }
    }
    linalg::sym_eig_extremes(&m).1.max(0.0).sqrt()
}
