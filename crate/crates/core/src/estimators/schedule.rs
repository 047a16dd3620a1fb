//! Batch-size and refresh-probability schedules.
//!
//! Theoretical schedules take their inputs through [`TheoryInputs`]; the
//! practical constants used in the experiments have their own helpers.

use crate::error::{config, Error, Result};

/// Which closed form the increasing mini-batch follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinibatchVariant {
    /// `⌊σ²(k+s)^{3+ν}/δ⌋`
    Power,
    /// `⌊σ²(k+s)³ ln(k+s)/δ⌋`
    LogPower,
}

/// Floors `x` but forgives values a few ulps below an integer.
pub(crate) fn floor_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

pub fn minibatch_schedule(
    sigma2: f64,
    delta: f64,
    nu: f64,
    s: f64,
    k: usize,
    variant: MinibatchVariant,
) -> Result<usize> {
    if !(delta > 0.0) {
        return config(format!("delta must be positive, got {delta}"));
    }
    if !(sigma2 > 0.0) {
        return config(format!("sigma2 must be positive, got {sigma2}"));
    }
    let ks = k as f64 + s;
    let raw = match variant {
        MinibatchVariant::Power => {
            if !(nu > 0.0) {
                return config(format!("nu must be positive, got {nu}"));
            }
            sigma2 * ks.powf(3.0 + nu) / delta
        }
        MinibatchVariant::LogPower => sigma2 * ks.powi(3) * ks.ln() / delta,
    };
    Ok((floor_tol(raw).min(usize::MAX as f64) as usize).max(1))
}

/// `max{lo, min{⌊c(l+1)³⌋, n}}` with `l` the epoch counter.
pub fn epoch_cubic_batch(coef: f64, min: usize, n: usize, epoch: usize) -> usize {
    let raw = floor_tol(coef * ((epoch + 1) as f64).powi(3));
    (raw.min(n as f64) as usize).max(min).min(n)
}

/// `p = 0.5·n^{−1/3}`, `b = ⌊0.5·n^{2/3}⌋`, used by the L-SVRG, SAGA,
/// VrEG and VrFRBS runs.
pub fn practical_svrg(n: usize) -> (usize, f64) {
    let c = (n as f64).cbrt();
    let b = floor_tol(0.5 * c * c) as usize;
    (b.clamp(1, n), (0.5 / c).min(1.0))
}

/// `p = 0.5·n^{−1/2}`, `b = ⌊0.5·√n⌋`.
pub fn practical_sarah(n: usize) -> (usize, f64) {
    let r = (n as f64).sqrt();
    let b = floor_tol(0.5 * r) as usize;
    (b.clamp(1, n), (0.5 / r).min(1.0))
}

/// Shared inputs of the theoretical schedules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInputs {
    pub n: usize,
    pub gamma: f64,
    pub eta: f64,
    pub rho_c: f64,
    pub s: f64,
}

impl TheoryInputs {
    fn check(&self) -> Result<()> {
        if !(self.rho_c > 0.0) {
            return config("theoretical schedules need rho_c > 0");
        }
        if !(self.eta > 0.0 && self.gamma > 0.0) || self.n == 0 {
            return config("theoretical schedules need eta > 0, Gamma > 0 and n >= 1");
        }
        Ok(())
    }

    fn ge(&self) -> f64 {
        self.gamma * self.eta
    }
}

fn too_small(kind: &str, need: f64, n: usize) -> Error {
    Error::Precondition(format!(
        "n too small for theoretical {kind} schedule: need n >= {need:.3}, got {n}; \
         fall back to the practical constants"
    ))
}

/// Returns `(b, p_k)`.
pub fn schedule_svrg(t: &TheoryInputs, nu: f64, c2: f64, k: usize) -> Result<(usize, f64)> {
    t.check()?;
    if !(nu > 0.0 && nu < 0.5) || !(c2 > 0.0) {
        return config("SVRG schedule needs nu in (0, 1/2) and c2 > 0");
    }
    let n = t.n as f64;
    let need = (2.0 * c2).powf(1.0 / nu).max((8.0 * t.ge() / (c2 * c2 * t.rho_c)).powf(1.0 / (1.0 - 2.0 * nu)));
    if n < need {
        return Err(too_small("SVRG", need, t.n));
    }
    let nnu = n.powf(nu);
    let b = floor_tol(8.0 * t.ge() * nnu * nnu / (c2 * c2 * t.rho_c)) as usize;
    let switch = floor_tol(4.0 * nnu / c2 - t.s);
    let p = if (k as f64) <= switch {
        c2 / nnu + 4.0 / (k as f64 + t.s + 1.0)
    } else {
        2.0 * c2 / nnu
    };
    Ok((b.clamp(1, t.n), p.min(1.0)))
}

/// Returns `b_k`.
pub fn schedule_saga(t: &TheoryInputs, k: usize) -> Result<usize> {
    t.check()?;
    let n = t.n as f64;
    let need = 80.0 * t.ge() / t.rho_c;
    if n < need {
        return Err(too_small("SAGA", need, t.n));
    }
    let c = (10.0 * t.ge() / t.rho_c).cbrt();
    let n13 = n.cbrt();
    let switch = floor_tol(4.0 * n13 / c - t.s);
    let raw = if (k as f64) <= switch {
        c * n13 * n13 + 4.0 * n / (k as f64 + t.s + 1.0)
    } else {
        2.0 * c * n13 * n13
    };
    Ok((floor_tol(raw) as usize).clamp(1, t.n))
}

/// Returns `(b, p_k)`; `fixed` selects the constant-probability variant
/// `p = Γη/(c₁ρ_c√n) + 2/(s+1)`.
pub fn schedule_sarah(t: &TheoryInputs, nu: f64, c1: f64, k: usize, fixed: bool) -> Result<(usize, f64)> {
    t.check()?;
    let n = t.n as f64;
    if !(0.0..=1.0).contains(&nu) || !(c1 > 0.0) || c1 > n.powf(1.0 - nu) * (1.0 + 1e-12) {
        return config("SARAH schedule needs nu in [0, 1] and c1 in (0, n^(1-nu)]");
    }
    let need = (2.0 * t.ge() / (c1 * t.rho_c)).powf(1.0 / nu);
    if n < need {
        return Err(too_small("SARAH", need, t.n));
    }
    let nnu = n.powf(nu);
    let b = floor_tol(c1 * nnu) as usize;
    let base = t.ge() / (c1 * t.rho_c * nnu);
    let p = if fixed {
        t.ge() / (c1 * t.rho_c * n.sqrt()) + 2.0 / (t.s + 1.0)
    } else if (k as f64) <= floor_tol(2.0 * c1 * t.rho_c * nnu / t.ge() - t.s) {
        base + 2.0 / (k as f64 + t.s + 1.0)
    } else {
        2.0 * base
    };
    Ok((b.clamp(1, t.n), p.min(1.0)))
}
