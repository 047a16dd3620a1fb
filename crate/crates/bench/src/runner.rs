//! Parallel execution of (seed × algorithm) cells.

use anyhow::{Context, Result};
use rayon::prelude::*;
use vfog_core::solver::{run, Budget, RunTrace};

use crate::algos::build_algo;
use crate::config::AlgoSpec;
use crate::presets::Experiment;

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub instance_id: String,
    pub seed: u64,
    pub algorithm: String,
    pub eta: f64,
    pub trace: RunTrace,
}

/// One problem instance per seed; all its algorithms share the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    pub instance_id: String,
    pub seed: u64,
    pub n: usize,
    pub cells: Vec<CellResult>,
}

pub fn instance_id(experiment: &str, seed: u64) -> String {
    format!("{experiment}-seed{seed}")
}

/// Runs every cell on `pool`. Output order follows the seed list, then the
/// algorithm list, whatever the scheduling.
pub fn run_experiment(exp: &Experiment, pool: &rayon::ThreadPool) -> Result<Vec<InstanceResult>> {
    run_with(exp, &exp.algorithms, &exp.seeds, &exp.budget, pool)
}

pub fn run_with(
    exp: &Experiment,
    algorithms: &[AlgoSpec],
    seeds: &[u64],
    budget: &Budget,
    pool: &rayon::ThreadPool,
) -> Result<Vec<InstanceResult>> {
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let id = instance_id(&exp.name, seed);
                let problem = exp.problem.build(&id, seed, exp.lipschitz).with_context(|| format!("building {id}"))?;
                log::info!("{id}: n = {}, dim = {}, L = {:.6e}", problem.n(), problem.dim(), problem.meta.lipschitz);
                let cells = algorithms
                    .par_iter()
                    .map(|spec| {
                        let label = spec.display();
                        let (cfg, eta) = build_algo(spec, &problem)?;
                        let trace = run(&problem, &cfg, budget, &exp.options, seed)
                            .with_context(|| format!("{id} / {label}"))?;
                        if let Some(f) = &trace.failure {
                            log::warn!("{id} / {label}: {f}");
                        }
                        Ok(CellResult { instance_id: id.clone(), seed, algorithm: label, eta, trace })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(InstanceResult { instance_id: id, seed, n: problem.n(), cells })
            })
            .collect()
    })
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("creating worker pool")
}

pub fn any_failed(results: &[InstanceResult]) -> bool {
    results.iter().flat_map(|r| &r.cells).any(|c| c.trace.failed)
}
