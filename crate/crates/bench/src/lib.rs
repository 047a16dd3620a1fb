//! Benchmark harness: configs, presets, parallel runs, CSV output, grid search.

pub mod algos;
pub mod config;
pub mod grid;
pub mod output;
pub mod presets;
pub mod report;
pub mod runner;

pub use config::{AlgoName, AlgoSpec, Config};
pub use presets::{resolve, Experiment, ProblemSpec, PRESETS};
pub use runner::{run_experiment, thread_pool, InstanceResult};
