//! Per-iteration parameters `t_k`, `γ_k`, `β_k` and the admissible stepsize range.

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub s: f64,
    pub eta: f64,
    pub rho_n: f64,
    pub rho_c: f64,
}

impl ScheduleParams {
    pub fn new(s: f64, eta: f64) -> Self {
        Self { s, eta, rho_n: 0.0, rho_c: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 2.0) {
            return config(format!("s must exceed 2, got {}", self.s));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return config(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.rho_c >= 0.0 && self.rho_n >= self.rho_c) {
            return config("need rho_n >= rho_c >= 0");
        }
        Ok(())
    }

    /// `t_k = k + s + 1`.
    pub fn t(&self, k: usize) -> f64 {
        k as f64 + self.s + 1.0
    }

    /// `γ_k = η(k+s)/((s−2)(k+s+1))`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.eta * (k as f64 + self.s) / ((self.s - 2.0) * self.t(k))
    }

    /// `β_k = [(s−2)η/(4(s−1)) + 2ρ_n](k+1)/(k+s+1) − γ_k/(k+s+1)`; may be negative.
    pub fn beta(&self, k: usize) -> f64 {
        let s = self.s;
        let t = self.t(k);
        ((s - 2.0) * self.eta / (4.0 * (s - 1.0)) + 2.0 * self.rho_n) * (k as f64 + 1.0) / t - self.gamma(k) / t
    }

    /// Logs a warning when `η` leaves `[8(s−1)ρ_n/(3s−2), λ/L)`.
    pub fn check_stepsize(&self, lipschitz: f64, lambda_active: f64) {
        let lo = 8.0 * (self.s - 1.0) * self.rho_n / (3.0 * self.s - 2.0);
        let hi = lambda_active / lipschitz;
        if self.eta < lo || self.eta >= hi {
            log::warn!("stepsize {} outside the guaranteed range [{lo}, {hi})", self.eta);
        }
    }
}

/// `[8(s−1)ρ_n/(3s−2), λ/L)`; errors when the range is empty.
pub fn stepsize_range(s: f64, lipschitz: f64, rho_n: f64, lambda_active: f64) -> Result<(f64, f64)> {
    if !(lipschitz > 0.0) {
        return config(format!("L must be positive, got {lipschitz}"));
    }
    let lo = 8.0 * (s - 1.0) * rho_n / (3.0 * s - 2.0);
    let hi = lambda_active / lipschitz;
    if lo > hi * (1.0 + 1e-12) {
        return config(format!(
            "empty stepsize range [{lo}, {hi}): L·rho_n = {} exceeds the admissible bound",
            lipschitz * rho_n
        ));
    }
    Ok((lo, hi))
}
