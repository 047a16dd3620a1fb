//! Certificates of the co-hypomonotonicity-type condition for linear finite sums:
//! `sym(Φ) + ρ_n ΦᵀΦ − (ρ_c/n) Σ 𝐆ᵢᵀ𝐆ᵢ ⪰ 0` with `Φ = 𝐆 + Ĝ`.

use nalgebra::DMatrix;

use crate::error::{config, Error, Result};
use crate::linalg;
use crate::problems::LinearProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub holds: bool,
    /// Smallest eigenvalue of the certificate matrix.
    pub min_eig: f64,
    /// Tolerance used: `1e-10 · ‖M‖₂`.
    pub tol: f64,
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn component_gram(problem: &LinearProblem) -> DMatrix<f64> {
    let p = problem.mean_matrix().nrows();
    problem.components.iter().fold(DMatrix::zeros(p, p), |acc, g| acc + g.transpose() * g)
}

pub fn verify_cohypo_linear(problem: &LinearProblem, rho_n: f64, rho_c: f64) -> Result<Certificate> {
    if !(rho_n >= 0.0 && rho_c >= 0.0) {
        return config("rho_n and rho_c must be nonnegative");
    }
    let phi = problem.phi();
    if phi.nrows() != phi.ncols() {
        return Err(Error::Dimension { expected: phi.nrows(), got: phi.ncols() });
    }
    let n = problem.components.len() as f64;
    let m = sym(&phi) + phi.transpose() * &phi * rho_n - component_gram(problem) * (rho_c / n);
    let (lo, hi) = linalg::sym_eig_extremes(&m);
    let tol = 1e-10 * lo.abs().max(hi.abs());
    Ok(Certificate { holds: lo >= -tol, min_eig: lo, tol })
}

/// Closed-form `(ρ_n, ρ_c)` from the extreme eigenvalues of `sym(Φ)`, `ΦᵀΦ`
/// and `𝐆ᵢᵀ𝐆ᵢ`. Returns `Infeasible` when `Φ` is rank deficient.
pub fn suggest_rho(problem: &LinearProblem) -> Result<(f64, f64)> {
    let phi = problem.phi();
    let (sym_lo, _) = linalg::sym_eig_extremes(&sym(&phi));
    let (gram_lo, gram_hi) = linalg::sym_eig_extremes(&(phi.transpose() * &phi));
    if !(gram_lo > 1e-12 * gram_hi.max(1e-300)) {
        return Err(Error::Infeasible("Phi is rank deficient; no certificate of this form".into()));
    }
    let rho_n = (-sym_lo / gram_lo).max(0.0);
    let denom: f64 = problem
        .components
        .iter()
        .map(|g| linalg::sym_eig_extremes(&(g.transpose() * g)).1)
        .sum();
    let n = problem.components.len() as f64;
    let rho_c = if denom > 0.0 { (n * (sym_lo + rho_n * gram_lo) / denom).max(0.0) } else { 0.0 };
    Ok((rho_n, rho_c))
}
