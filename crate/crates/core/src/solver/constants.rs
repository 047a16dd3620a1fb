//! Constant bundles for the two convergence regimes and the rate bound.

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Error-bound estimators with `(κ, Θ)`; `ρ_c = 0`.
    General,
    /// Control-variate estimators with mixing weight `α < 1`.
    ControlVariate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsBundle {
    pub regime: Regime,
    pub s: f64,
    /// `Λ₀`, or `Λ̂₀` in the control-variate regime.
    pub lambda0: f64,
    /// `ω` or `ω̂`.
    pub omega: f64,
    /// `μ` or `μ̂`; admissibility needs `Lρ_n ≤ μ`.
    pub mu: f64,
    /// `λ` or `λ̂`; the stepsize must stay below `λ/L`.
    pub lambda: f64,
    /// `Γ`, zero in the general regime.
    pub gamma: f64,
}

/// Offset `c` in the `16s − c` factor of `Γ` and `Λ̂₀`.
pub const GAMMA_OFFSET: f64 = 19.0;

pub fn constants_general(s: f64, kappa: f64, theta: f64) -> Result<ConstantsBundle> {
    if !(s > 2.0) {
        return config(format!("s must exceed 2, got {s}"));
    }
    if s <= 7.0 {
        log::warn!("s = {s} lies outside the s > 7 regime of the rate guarantee");
    }
    if !(kappa <= 1.0) || theta < 0.0 {
        return config("need kappa <= 1 and theta >= 0");
    }
    let s1 = s + 1.0;
    let denom = (s - 2.0) * (s * s - (1.0 - kappa) * s1 * s1);
    if !(denom > 0.0) {
        return config(format!(
            "denominator nonpositive: kappa must exceed (2s+1)/(s+1)^2 = {}",
            (2.0 * s + 1.0) / (s1 * s1)
        ));
    }
    let lambda0 = s * s * (16.0 * s - 18.0) / denom;
    let omega = 1.0 + 2.0 * (11.0 * s - 13.0) / (s - 2.0) + 2.0 * lambda0 * theta * s1 * s1 / (s * s);
    let root = (2.0 * (1.0 + omega) * s1).sqrt();
    Ok(ConstantsBundle {
        regime: Regime::General,
        s,
        lambda0,
        omega,
        mu: (3.0 * s - 2.0) / (8.0 * (s - 1.0) * root),
        lambda: 1.0 / root,
        gamma: 0.0,
    })
}

pub fn constants_vr(s: f64, alpha: f64, c_bar: f64) -> Result<ConstantsBundle> {
    constants_vr_with_offset(s, alpha, c_bar, GAMMA_OFFSET)
}

/// As [`constants_vr`] with `Γ = 3s²(16s − offset)/((s−2)(s+1))` and
/// `Λ̂₀ = (16s − offset)/(c̄(s−2))`.
pub fn constants_vr_with_offset(s: f64, alpha: f64, c_bar: f64, offset: f64) -> Result<ConstantsBundle> {
    if !(s > 2.0) {
        return config(format!("s must exceed 2, got {s}"));
    }
    if alpha >= 1.0 {
        return config("alpha = 1 divides by zero; use the general regime");
    }
    if !(alpha >= 0.0) || !(c_bar > 0.0) {
        return config("need alpha in [0, 1) and c_bar > 0");
    }
    // 11s − 13 reproduces the reference value ω̂ = 29.625 at s = 5, α = 0
    let omega = (3.0 * s - 2.0) / (2.0 * (1.0 - alpha) * (s - 1.0)) + 2.0 * (11.0 * s - 13.0) / (s - 2.0);
    let lambda = 1.0 / (2.0 * (s + 1.0) * (1.0 + omega)).sqrt();
    let f = 16.0 * s - offset;
    Ok(ConstantsBundle {
        regime: Regime::ControlVariate,
        s,
        lambda0: f / (c_bar * (s - 2.0)),
        omega,
        mu: lambda * (3.0 * s - 2.0) / (8.0 * (s - 1.0)),
        lambda,
        gamma: 3.0 * s * s * f / ((s - 2.0) * (s + 1.0)),
    })
}

/// `C₀ = 16(s−1)(s−2)η / ((3s²−8s−1)η − 8(s−1)(s−2)ρ_n)`.
pub fn rate_c0(s: f64, eta: f64, rho_n: f64) -> Result<f64> {
    let den = (3.0 * s * s - 8.0 * s - 1.0) * eta - 8.0 * (s - 1.0) * (s - 2.0) * rho_n;
    if !(den > 0.0) {
        return config("rate constant undefined: stepsize too small for rho_n");
    }
    Ok(16.0 * (s - 1.0) * (s - 2.0) * eta / den)
}

/// `ℛ₀²` from `‖Gx⁰ + v⁰‖²` and `‖x⁰ − x⋆‖²`.
pub fn rate_r0_sq(s: f64, eta: f64, residual0_sq: f64, dist0_sq: f64) -> f64 {
    let a = ((3.0 * s - 2.0) * (s - 2.0) * s * s - 4.0 * (s - 1.0).powi(2)) / (8.0 * (s - 1.0));
    let b = s * (s * s - 1.0) * (s - 2.0) / (2.0 * eta * eta);
    a * residual0_sq + b * dist0_sq
}

/// `C₀(ℛ₀² + Λ₀S_k)/(k+s)²`.
pub fn rate_bound(c0: f64, r0_sq: f64, lambda0: f64, s_k: f64, s: f64, k: usize) -> f64 {
    let ks = k as f64 + s;
    c0 * (r0_sq + lambda0 * s_k) / (ks * ks)
}
