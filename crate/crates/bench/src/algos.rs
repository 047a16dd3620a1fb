//! Turning an [`AlgoSpec`] into a solver configuration for a concrete problem.

use anyhow::Result;
use vfog_core::baselines::{vreg_stepsize, vrfrbs_stepsize};
use vfog_core::estimators::{practical_sarah, practical_svrg, EstimatorConfig, EstimatorKind, Schedule};
use vfog_core::solver::{AlgoConfig, ScheduleParams};
use vfog_core::Problem;

use crate::config::{AlgoName, AlgoSpec};

/// `(b, p)` before overrides.
fn default_pb(name: AlgoName, n: usize, scale: f64) -> (usize, f64) {
    let (b, p) = match name {
        AlgoName::VfogSarah => practical_sarah(n),
        _ => practical_svrg(n),
    };
    (((b as f64 * scale).floor() as usize).clamp(1, n), (p * scale).min(1.0))
}

/// Stepsize rule that `eta_scale` multiplies.
pub fn base_stepsize(name: AlgoName, lipschitz: f64, p: f64) -> f64 {
    match name {
        AlgoName::Vreg => vreg_stepsize(p, lipschitz),
        AlgoName::Vrfrbs => vrfrbs_stepsize(p, lipschitz),
        _ => 1.0 / lipschitz,
    }
}

fn default_eta_scale(name: AlgoName) -> f64 {
    if name.is_vfog() {
        0.125
    } else {
        1.0
    }
}

/// The solver configuration plus the stepsize actually used.
pub fn build_algo(spec: &AlgoSpec, problem: &Problem) -> Result<(AlgoConfig, f64)> {
    let n = problem.n();
    let (b0, p0) = default_pb(spec.name, n, spec.pb_scale.unwrap_or(1.0));
    let b = spec.b.unwrap_or(b0);
    let p = spec.p.unwrap_or(p0);
    let eta = spec.eta.unwrap_or_else(|| {
        spec.eta_scale.unwrap_or(default_eta_scale(spec.name)) * base_stepsize(spec.name, problem.meta.lipschitz, p)
    });
    let vfog = |kind, schedule| {
        let params = ScheduleParams {
            s: spec.s.unwrap_or(3.0),
            eta,
            rho_n: spec.rho_n.unwrap_or(0.0),
            rho_c: spec.rho_c.unwrap_or(0.0),
        };
        let mut est = EstimatorConfig::new(kind, schedule);
        est.s = params.s;
        est.sigma2 = problem.meta.sigma2;
        if let Some(w) = spec.with_replacement {
            est.with_replacement = w;
        }
        AlgoConfig::Vfog { params, estimator: est }
    };
    let constant = Schedule::Constant { batch: b, prob: p };
    let cfg = match spec.name {
        AlgoName::VfogExact => vfog(EstimatorKind::Exact, constant),
        AlgoName::VfogSgd => vfog(
            EstimatorKind::MiniBatch,
            Schedule::EpochCubic { coef: spec.sgd_coef.unwrap_or(0.05), min: spec.sgd_min.unwrap_or(5) },
        ),
        AlgoName::VfogSvrg => vfog(EstimatorKind::LSvrg, constant),
        AlgoName::VfogSaga => vfog(EstimatorKind::Saga, constant),
        AlgoName::VfogSarah => vfog(EstimatorKind::LSarah, constant),
        AlgoName::Og => AlgoConfig::Peg { eta },
        AlgoName::Vreg => AlgoConfig::VrEg { eta, p, b },
        AlgoName::Vrfrbs => AlgoConfig::VrFrbs { eta, p, b },
    };
    Ok((cfg, eta))
}
