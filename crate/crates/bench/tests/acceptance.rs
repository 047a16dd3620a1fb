//! Acceptance checks. One PASS/FAIL line per criterion; exits nonzero on any FAIL.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use vfog_bench::output::write_all;
use vfog_bench::{resolve, run_experiment, thread_pool, Config, InstanceResult};
use vfog_core::certify::verify_cohypo_linear;
use vfog_core::estimators::{Estimator, EstimatorConfig, EstimatorKind, Schedule};
use vfog_core::linalg;
use vfog_core::problems::{build_linear_example1, build_linear_random, project_nonneg_ball, project_simplex, LinearProblem};
use vfog_core::solver::{constants_vr, rate_certificate, run, AlgoConfig, Budget, ProbeCadence, RunOptions, ScheduleParams};
use vfog_core::{FiniteSumOperator, Rng};

type Outcome = (bool, String);

// ---------------------------------------------------------------- constants

const OMEGA_HAT: f64 = 29.625;
const LAMBDA_HAT: f64 = 0.052164;
const MU_HAT: f64 = 0.021192;
const CONST_TOL: f64 = 1e-5;

fn constants() -> Outcome {
    let c = constants_vr(5.0, 0.0, 1.0).expect("valid inputs");
    let ok = c.omega == OMEGA_HAT && (c.lambda - LAMBDA_HAT).abs() <= CONST_TOL && (c.mu - MU_HAT).abs() <= CONST_TOL;
    (ok, format!("omega = {}, lambda = {:.7}, mu = {:.7}", c.omega, c.lambda, c.mu))
}

// ---------------------------------------------------------------- rate

const RATE_DIM: usize = 50;
const RATE_SLOPE_MAX: f64 = -1.8;
const RATE_SECONDS: f64 = 30.0;

fn rate_slope() -> Outcome {
    let started = Instant::now();
    let problem = build_linear_random(RATE_DIM, 20, 0.5, 0).into_problem("rate");
    let lam = constants_vr(5.0, 0.0, 1.0).expect("valid inputs").lambda;
    let cfg = AlgoConfig::Vfog {
        params: ScheduleParams::new(5.0, 0.9 * lam / problem.meta.lipschitz),
        estimator: EstimatorConfig::exact(),
    };
    let opts = RunOptions { probe: ProbeCadence::EveryIterations(10), ..RunOptions::default() };
    let trace = run(&problem, &cfg, &Budget::iterations(10_000), &opts, 0).expect("run");
    let slope = rate_certificate(&trace, 100, 10_000).expect("enough records");
    let secs = started.elapsed().as_secs_f64();
    (slope <= RATE_SLOPE_MAX && secs < RATE_SECONDS && !trace.failed, format!("slope = {slope:.4}, {secs:.1} s"))
}

// ---------------------------------------------------------------- game-exp1

const MIN_WINNING_SEEDS: usize = 8;

fn final_residual(inst: &InstanceResult, alg: &str) -> f64 {
    let c = inst.cells.iter().find(|c| c.algorithm == alg).expect("algorithm present");
    if c.trace.failed {
        f64::INFINITY
    } else {
        c.trace.last().expect("nonempty").residual_sq
    }
}

fn baseline_separation(results: &[InstanceResult]) -> Outcome {
    let algs: Vec<String> = results[0].cells.iter().map(|c| c.algorithm.clone()).collect();
    let wins = results
        .iter()
        .filter(|r| {
            let og = final_residual(r, "OG");
            final_residual(r, "VFOG-Saga") < og && final_residual(r, "VFOG-Sarah") < og
        })
        .count();
    let means: Vec<(String, f64)> = algs
        .iter()
        .map(|a| (a.clone(), results.iter().map(|r| final_residual(r, a)).sum::<f64>() / results.len() as f64))
        .collect();
    let worst = means.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
    let table: Vec<String> = means.iter().map(|(a, m)| format!("{a} {m:.3e}")).collect();
    let ok = results.len() == 10 && algs.len() == 7 && wins >= MIN_WINNING_SEEDS && worst.0 == "VrFRBS";
    (ok, format!("Saga & Sarah < OG in {wins}/{} seeds; worst = {}; means: {}", results.len(), worst.0, table.join(", ")))
}

// ---------------------------------------------------------------- estimators

const REPS: usize = 100_000;
const SIGMAS: f64 = 4.0;

fn toy() -> LinearProblem {
    build_linear_random(3, 10, 1.0, 17)
}

fn point(seed: u64) -> Vec<f64> {
    let mut r = Rng::new(seed);
    (0..3).map(|_| r.normal()).collect()
}

fn warmed(op: &LinearProblem, kind: EstimatorKind, b: usize, p: f64) -> (Estimator, Vec<f64>) {
    let mut e = Estimator::new(EstimatorConfig::new(kind, Schedule::Constant { batch: b, prob: p }), op);
    let mut prev = point(1);
    e.init_full_pass(op, &prev);
    let mut rng = Rng::new(99);
    for s in 0..4 {
        let y = point(10 + s);
        e.estimate(op, &y, &prev, &mut rng).expect("estimate");
        prev = y;
    }
    (e, prev)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn unbiasedness() -> Outcome {
    let op = toy();
    let y = point(77);
    let gy = op.eval_full(&y);
    let mut ok = true;
    let mut worst = 0.0f64;
    for kind in [EstimatorKind::MiniBatch, EstimatorKind::LSvrg, EstimatorKind::Saga] {
        let (e, prev) = warmed(&op, kind, 3, 0.2);
        let mut rng = Rng::with_stream(2024, kind as u64);
        let mut cols = vec![Vec::with_capacity(REPS); 3];
        for _ in 0..REPS {
            let g = e.clone().estimate(&op, &y, &prev, &mut rng).expect("estimate");
            for j in 0..3 {
                cols[j].push(g[j]);
            }
        }
        for j in 0..3 {
            let (m, se) = mean_se(&cols[j]);
            let z = (m - gy[j]).abs() / se;
            worst = worst.max(z);
            ok &= z <= SIGMAS;
        }
    }
    (ok, format!("max |mean - Gy|/se = {worst:.2} over 3 estimators x 3 coords, {REPS} draws"))
}

fn drift(op: &LinearProblem, a: &[f64], b: &[f64]) -> f64 {
    let n = op.n_components();
    (0..n).map(|i| linalg::dist(&op.eval_component(i, a), &op.eval_component(i, b)).powi(2)).sum::<f64>() / n as f64
}

fn vr_recursion() -> Outcome {
    let op = toy();
    let y = point(77);
    let y_next = point(78);
    let gy = op.eval_full(&y);
    let mut ok = true;
    let mut notes = Vec::new();
    for (kind, p) in [(EstimatorKind::LSvrg, 0.2), (EstimatorKind::Saga, 1.0), (EstimatorKind::LSarah, 0.2)] {
        let (e, prev) = warmed(&op, kind, 3, p);
        let vrc = e.vr_constants(5).expect("constants");
        let saga = kind == EstimatorKind::Saga;
        // SAGA reads its table before refreshing it, so its recursion is one step later
        let (delta_prev, d) =
            if saga { (e.delta_tracker(&op, &y), drift(&op, &y_next, &y)) } else { (e.delta_tracker(&op, &prev), drift(&op, &y, &prev)) };
        let rhs = (1.0 - vrc.kappa) * delta_prev + vrc.theta * d;
        let mut rng = Rng::with_stream(77, kind as u64);
        let mut deltas = Vec::with_capacity(REPS);
        let mut gaps = Vec::with_capacity(REPS);
        for _ in 0..REPS {
            let mut c = e.clone();
            let g = c.estimate(&op, &y, &prev, &mut rng).expect("estimate");
            let mse = linalg::dist(&g, &gy).powi(2);
            let tracker = if saga { c.delta_tracker(&op, &y_next) } else { c.delta_tracker(&op, &y) };
            deltas.push(tracker);
            gaps.push(mse - if saga { delta_prev } else { tracker });
        }
        let (m, se) = mean_se(&deltas);
        let (gm, gse) = mean_se(&gaps);
        ok &= m <= rhs + SIGMAS * se && gm <= SIGMAS * gse;
        notes.push(format!("{kind:?}: E[D] = {m:.4} vs bound {rhs:.4}"));
    }
    (ok, notes.join("; "))
}

// ---------------------------------------------------------------- projections

const PROJ_TOL: f64 = 1e-8;

fn simplex_by_enumeration(y: &[f64]) -> Vec<f64> {
    let d = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << d) {
        let support: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
        let shift = (support.iter().map(|&i| y[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut x = vec![0.0; d];
        let mut feasible = true;
        for &i in &support {
            x[i] = y[i] - shift;
            feasible &= x[i] >= -1e-15;
        }
        if feasible {
            let dist = linalg::dist(&x, y);
            if best.as_ref().is_none_or(|b| dist < b.0) {
                best = Some((dist, x));
            }
        }
    }
    best.expect("some support is feasible").1
}

// alternating projections with Dykstra corrections onto the orthant and the ball
fn ball_by_dykstra(y: &[f64], r: f64) -> Vec<f64> {
    let d = y.len();
    let (mut x, mut p, mut q) = (y.to_vec(), vec![0.0; d], vec![0.0; d]);
    for _ in 0..100_000 {
        let a: Vec<f64> = (0..d).map(|i| (x[i] + p[i]).max(0.0)).collect();
        for i in 0..d {
            p[i] += x[i] - a[i];
        }
        let t: Vec<f64> = (0..d).map(|i| a[i] + q[i]).collect();
        let nt = linalg::norm(&t);
        let b: Vec<f64> = if nt > r { t.iter().map(|v| v * r / nt).collect() } else { t };
        for i in 0..d {
            q[i] += a[i] - b[i];
        }
        let moved = linalg::dist(&b, &x);
        x = b;
        if moved < 1e-15 {
            break;
        }
    }
    x
}

fn projections() -> Outcome {
    let mut rng = Rng::new(31);
    let mut worst_s = 0.0f64;
    let mut worst_b = 0.0f64;
    for _ in 0..50 {
        let y: Vec<f64> = (0..6).map(|_| 2.0 * rng.normal()).collect();
        worst_s = worst_s.max(linalg::dist(&project_simplex(&y), &simplex_by_enumeration(&y)));
        let y: Vec<f64> = (0..5).map(|_| 3.0 * rng.normal()).collect();
        let r = 0.5 + 2.0 * rng.uniform();
        worst_b = worst_b.max(linalg::dist(&project_nonneg_ball(&y, r), &ball_by_dykstra(&y, r)));
    }
    (worst_s <= PROJ_TOL && worst_b <= PROJ_TOL, format!("simplex err {worst_s:.2e}, ball err {worst_b:.2e}"))
}

// ---------------------------------------------------------------- certificate

fn certificate() -> Outcome {
    let ex = build_linear_example1();
    let good = verify_cohypo_linear(&ex, 1.2, 0.1).expect("valid");
    let bad = verify_cohypo_linear(&ex, 0.0, 0.0).expect("valid");
    (
        good.holds && !bad.holds,
        format!("(1.2, 0.1): min eig {:.4}; (0, 0): min eig {:.4}", good.min_eig, bad.min_eig),
    )
}

// ---------------------------------------------------------------- oracle accounting

const COST_N: usize = 100;
const COST_P: f64 = 0.01;
const COST_B: usize = 20;
const COST_ITERS: usize = 10_000;
const COST_REL_TOL: f64 = 0.02;

fn svrg_cost() -> Outcome {
    let op = build_linear_random(3, COST_N, 1.0, 5);
    let cfg = EstimatorConfig::new(EstimatorKind::LSvrg, Schedule::Constant { batch: COST_B, prob: COST_P });
    let mut e = Estimator::new(cfg, &op);
    let mut prev = point(0);
    e.init_full_pass(&op, &prev);
    let start = e.oracle_calls();
    let mut rng = Rng::new(8);
    for k in 0..COST_ITERS {
        let y = point(1000 + k as u64);
        e.estimate(&op, &y, &prev, &mut rng).expect("estimate");
        prev = y;
    }
    let per_iter = (e.oracle_calls() - start) as f64 / COST_ITERS as f64;
    let target = COST_N as f64 * COST_P + 2.0 * (1.0 - COST_P) * COST_B as f64;
    let rel = (per_iter - target).abs() / target;
    (rel <= COST_REL_TOL, format!("{per_iter:.3} calls/iter vs {target:.3} ({:.2}%)", 100.0 * rel))
}

// ---------------------------------------------------------------- determinism

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .expect("readable")
        .map(|e| e.expect("entry").path())
        .map(|p| (p.file_name().expect("name").to_string_lossy().into_owned(), std::fs::read(&p).expect("read")))
        .collect();
    v.sort();
    v
}

fn determinism(first: &[InstanceResult], exp: &vfog_bench::Experiment) -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    write_all(&a, &exp.name, first).expect("write");
    let again = run_experiment(exp, &thread_pool(2).expect("pool")).expect("rerun");
    write_all(&b, &exp.name, &again).expect("write");
    let (fa, fb) = (files(&a), files(&b));
    (!fa.is_empty() && fa == fb, format!("{} CSV files compared byte for byte", fa.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let (ok, detail) = f();
        let secs = t.elapsed().as_secs_f64();
        println!("{} {name}: {detail} [{secs:.1} s]", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };
    report("constants", &mut constants);
    report("rate-certificate", &mut rate_slope);
    let exp = resolve(&Config::from_preset("game-exp1"), 0).expect("preset");
    let mut game: Vec<InstanceResult> = Vec::new();
    report("baseline-separation", &mut || {
        game = run_experiment(&exp, &thread_pool(1).expect("pool")).expect("game-exp1 runs");
        baseline_separation(&game)
    });
    report("estimator-unbiasedness", &mut unbiasedness);
    report("vr-recursion", &mut vr_recursion);
    report("projection-oracles", &mut projections);
    report("certificate-example1", &mut certificate);
    report("svrg-oracle-cost", &mut svrg_cost);
    report("determinism", &mut || determinism(&game, &exp));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
