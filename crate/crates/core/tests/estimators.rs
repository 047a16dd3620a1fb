use vfog_core::estimators::{
    check_kappa_theta, schedule_saga, schedule_sarah, Estimator, EstimatorConfig, EstimatorKind,
    Schedule, TheoryInputs,
};
use vfog_core::linalg;
use vfog_core::problems::{build_linear_random, LinearProblem};
use vfog_core::solver::constants_vr;
use vfog_core::{FiniteSumOperator, Rng};

fn toy() -> LinearProblem {
    build_linear_random(3, 10, 1.0, 17)
}

fn point(seed: u64, p: usize) -> Vec<f64> {
    let mut r = Rng::new(seed);
    (0..p).map(|_| r.normal()).collect()
}

fn cfg(kind: EstimatorKind, batch: usize, prob: f64) -> EstimatorConfig {
    EstimatorConfig::new(kind, Schedule::Constant { batch, prob })
}

/// Initialise at `x0` and take `steps` estimates along a fixed path.
fn warmed(op: &LinearProblem, c: EstimatorConfig, steps: usize) -> (Estimator, Vec<f64>) {
    let mut e = Estimator::new(c, op);
    let mut prev = point(1, 3);
    e.init_full_pass(op, &prev);
    let mut rng = Rng::new(99);
    for s in 0..steps {
        let y = point(10 + s as u64, 3);
        e.estimate(op, &y, &prev, &mut rng).unwrap();
        prev = y;
    }
    (e, prev)
}

#[test]
fn exact_costs_n() {
    let op = toy();
    let mut e = Estimator::new(EstimatorConfig::exact(), &op);
    let y0 = point(1, 3);
    e.init_full_pass(&op, &y0);
    assert_eq!(e.oracle_calls(), 10);
    let y = point(2, 3);
    let g = e.estimate(&op, &y, &y0, &mut Rng::new(0)).unwrap();
    assert_eq!(g, op.eval_full(&y));
    assert_eq!(e.oracle_calls(), 20);
}

#[test]
fn full_batches_are_exact() {
    let op = toy();
    let y0 = point(1, 3);
    let y = point(2, 3);
    let gy = op.eval_full(&y);
    for kind in [EstimatorKind::MiniBatch, EstimatorKind::LSvrg] {
        let mut c = cfg(kind, 10, 0.5);
        c.with_replacement = false;
        let mut e = Estimator::new(c, &op);
        e.init_full_pass(&op, &y0);
        let g = e.estimate(&op, &y, &y0, &mut Rng::new(3)).unwrap();
        assert!(linalg::dist(&g, &gy) < 1e-12, "{kind:?}");
    }
}

#[test]
fn sarah_with_unit_probability_is_exact() {
    let op = toy();
    let (mut sarah, _) = warmed(&op, cfg(EstimatorKind::LSarah, 3, 1.0), 0);
    let (mut exact, _) = warmed(&op, EstimatorConfig::exact(), 0);
    let mut prev = point(1, 3);
    let mut rng = Rng::new(5);
    for s in 0..20 {
        let y = point(40 + s, 3);
        let a = sarah.estimate(&op, &y, &prev, &mut rng).unwrap();
        let b = exact.estimate(&op, &y, &prev, &mut rng).unwrap();
        assert_eq!(a, b);
        prev = y;
    }
}

#[test]
fn init_seeds_memory() {
    let op = toy();
    let y0 = point(1, 3);
    let g0 = op.eval_full(&y0);
    let (saga, _) = warmed(&op, cfg(EstimatorKind::Saga, 4, 1.0), 0);
    let mut avg = vec![0.0; 3];
    for i in 0..10 {
        linalg::axpy(0.1, saga.table_row(i), &mut avg);
    }
    assert!(linalg::dist(&avg, &g0) < 1e-12);
    assert_eq!(saga.oracle_calls(), 10);
    // the snapshot sits at y0, so the first estimate there is exact for any batch
    let mut svrg = Estimator::new(cfg(EstimatorKind::LSvrg, 2, 0.3), &op);
    svrg.init_full_pass(&op, &y0);
    let g = svrg.estimate(&op, &y0, &y0, &mut Rng::new(4)).unwrap();
    assert!(linalg::dist(&g, &g0) < 1e-12);
}

#[test]
fn saga_without_replacement_rejects_oversized_batch() {
    let op = toy();
    let mut c = cfg(EstimatorKind::Saga, 11, 1.0);
    c.with_replacement = false;
    let mut e = Estimator::new(c, &op);
    let y0 = point(1, 3);
    e.init_full_pass(&op, &y0);
    assert!(e.estimate(&op, &y0, &y0, &mut Rng::new(0)).is_err());
}

#[test]
fn minibatch_variance_bound() {
    let op = toy();
    let y = point(7, 3);
    let gy = op.eval_full(&y);
    let sigma2: f64 =
        (0..10).map(|i| linalg::dist(&op.eval_component(i, &y), &gy).powi(2)).sum::<f64>() / 10.0;
    let b = 4;
    let (e, prev) = warmed(&op, cfg(EstimatorKind::MiniBatch, b, 1.0), 0);
    let mut rng = Rng::new(8);
    let reps = 20_000;
    let mut errs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut c = e.clone();
        let g = c.estimate(&op, &y, &prev, &mut rng).unwrap();
        errs.push(linalg::dist(&g, &gy).powi(2));
    }
    let mean = errs.iter().sum::<f64>() / reps as f64;
    let var = errs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    // with replacement the mean-squared error equals σ²/b exactly
    assert!((mean - sigma2 / b as f64).abs() <= 4.0 * (var / reps as f64).sqrt());
}

#[test]
fn svrg_cost_per_iteration() {
    let op = build_linear_random(2, 100, 0.5, 3);
    let (n, p, b) = (100.0, 0.01, 20usize);
    let mut e = Estimator::new(cfg(EstimatorKind::LSvrg, b, p), &op);
    let y = vec![0.3, -0.2];
    e.init_full_pass(&op, &y);
    let mut rng = Rng::new(2024);
    let iters = 10_000;
    let mut costs = Vec::with_capacity(iters);
    // k = 0 never refreshes
    e.estimate(&op, &y, &y, &mut rng).unwrap();
    let mut last = e.oracle_calls();
    for _ in 0..iters {
        e.estimate(&op, &y, &y, &mut rng).unwrap();
        costs.push((e.oracle_calls() - last) as f64);
        last = e.oracle_calls();
    }
    let mean = costs.iter().sum::<f64>() / iters as f64;
    let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (iters - 1) as f64;
    let bf = b as f64;
    // a refresh costs n + b because the batch at the new snapshot is part of the pass
    let expected = n * p + (2.0 - p) * bf;
    assert!((mean - expected).abs() <= 4.0 * (var / iters as f64).sqrt(), "{mean} vs {expected}");
}

#[test]
fn saga_schedule_window() {
    let c = constants_vr(5.0, 0.0, 1.0).unwrap();
    let eta = 0.9 * c.lambda;
    let t = TheoryInputs { n: 1000, gamma: c.gamma, eta, rho_c: 80.0 * c.gamma * eta / 1000.0, s: 5.0 };
    let mut prev = schedule_saga(&t, 0).unwrap();
    let mut violations = Vec::new();
    for k in 1..=10_000 {
        let b = schedule_saga(&t, k).unwrap();
        assert!(b >= 1 && b <= 1000);
        let lo = prev as f64 - (b * prev) as f64 / 4000.0;
        if !(b as f64 >= lo && b <= prev) {
            violations.push((k, prev, b));
        }
        prev = b;
    }
    // the only place the window can break is the branch switch
    assert!(violations.len() <= 1, "{violations:?}");
    let small = TheoryInputs { n: 10, ..t };
    assert!(schedule_saga(&small, 0).is_err());
}

#[test]
fn sarah_schedule_satisfies_condition() {
    let c = constants_vr(5.0, 0.0, 1.0).unwrap();
    let eta = 0.5 * c.lambda;
    let n = 10_000;
    let rho_c = 0.5;
    let t = TheoryInputs { n, gamma: c.gamma, eta, rho_c, s: 5.0 };
    // c1·√n integral so the floor in b does not bite
    let c1 = 0.5;
    let op = vfog_core::problems::build_linear_identity(1, n);
    for k in 0..=10_000 {
        let (b, p) = schedule_sarah(&t, 0.5, c1, k, false).unwrap();
        assert!(p > 0.0 && p <= 1.0);
        let e = Estimator::new(cfg(EstimatorKind::LSarah, b, p), &op);
        let vrc = e.vr_constants(k).unwrap();
        assert!(check_kappa_theta(&vrc, eta, rho_c, c.gamma, k, 5.0).unwrap(), "k = {k}");
    }
    let (_, pf) = schedule_sarah(&t, 0.5, c1, 0, true).unwrap();
    assert!((pf - (c.gamma * eta / (c1 * rho_c * 100.0) + 2.0 / 6.0)).abs() < 1e-15);
}
