//! Power-iteration spectral norm estimates for matrix-free linear maps.

use crate::linalg::{self, LinearMap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when `iters` ran out before the relative change fell below tolerance.
    pub converged: bool,
}

const RTOL: f64 = 1e-6;

fn start_vector(p: usize) -> Vec<f64> {
    // fixed, dense and not aligned with coordinate axes
    let mut x: Vec<f64> = (0..p).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
    let nrm = linalg::norm(&x);
    x.iter_mut().for_each(|v| *v /= nrm);
    x
}

/// Estimate `‖A‖₂` by power iteration on `AᵀA`.
///
/// Convergence is declared when two consecutive estimates agree to a relative
/// `1e-6 · 1e-3`, leaving headroom so the returned value is typically within
/// `1e-6` of the true norm.
pub fn operator_norm_estimate(map: &dyn LinearMap, iters: usize) -> NormEstimate {
    let iters = iters.max(10);
    let mut x = start_vector(map.dim_in());
    let mut ax = vec![0.0; map.dim_out()];
    let mut atax = vec![0.0; map.dim_in()];
    let mut sigma = 0.0f64;
    for it in 1..=iters {
        map.apply(&x, &mut ax);
        map.apply_transpose(&ax, &mut atax);
        let lam = linalg::norm(&atax);
        if lam == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true };
        }
        // ‖AᵀAx‖ with ‖x‖ = 1 approaches σ²_max from below
        let new_sigma = lam.sqrt();
        x.iter_mut().zip(&atax).for_each(|(xi, &a)| *xi = a / lam);
        if it > 1 && (new_sigma - sigma).abs() <= RTOL * 1e-3 * new_sigma {
            return NormEstimate { value: new_sigma, iterations: it, converged: true };
        }
        sigma = new_sigma;
    }
    log::warn!("power iteration did not converge in {iters} iterations");
    NormEstimate { value: sigma, iterations: iters, converged: false }
}
