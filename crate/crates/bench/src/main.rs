use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vfog_bench::grid::{grid_search, grid_table};
use vfog_bench::output::{summary, write_all};
use vfog_bench::report::certify_report;
use vfog_bench::runner::any_failed;
use vfog_bench::{resolve, run_experiment, thread_pool, Config, Experiment, PRESETS};

#[derive(Parser)]
#[command(name = "vfog-bench", about = "Benchmarks for variance-reduced optimistic-gradient solvers")]
struct Cli {
    /// Worker threads; the VFOG_JOBS environment variable takes precedence.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Run a preset with its defaults.
    #[arg(long)]
    preset: Option<String>,
    /// Added to every seed.
    #[arg(long, default_value_t = 0)]
    seed_offset: u64,
}

impl Source {
    fn experiment(&self) -> Result<Experiment> {
        let cfg = match (&self.config, &self.preset) {
            (Some(path), _) => Config::load(path)?,
            (None, Some(name)) => Config::from_preset(name),
            (None, None) => bail!("pass --config PATH or --preset NAME"),
        };
        resolve(&cfg, self.seed_offset)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, seed) cell and write CSVs.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Pick the stepsize multiplier with the smallest pilot residual.
    Gridsearch {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Report (rho_n, rho_c) certificates for a linear instance.
    Certify {
        #[command(flatten)]
        source: Source,
        /// Pairs to check, as RHO_N,RHO_C.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(f64, f64)>,
    },
    ListPresets,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected RHO_N,RHO_C")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn jobs(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var("VFOG_JOBS") {
        return v.trim().parse::<usize>().ok().filter(|&j| j > 0).context("VFOG_JOBS must be a positive integer");
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            for (name, about) in PRESETS {
                println!("{name:<16} {about}");
            }
        }
        Command::Certify { source, pairs } => {
            print!("{}", certify_report(&source.experiment()?, &pairs)?);
        }
        Command::Run { source, out } => {
            let exp = source.experiment()?;
            let pool = thread_pool(jobs(cli.jobs)?)?;
            let results = run_experiment(&exp, &pool)?;
            let paths = write_all(&out, &exp.name, &results)?;
            print!("{}", summary(&results));
            println!("wrote {} files to {}", paths.len(), out.display());
            if any_failed(&results) {
                eprintln!("some runs diverged");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Gridsearch { source, out } => {
            let exp = source.experiment()?;
            let pool = thread_pool(jobs(cli.jobs)?)?;
            let results = grid_search(&exp, &pool)?;
            print!("{}", grid_table(&results));
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("{}_grid.csv", exp.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["algorithm", "multiplier", "eta", "final_residual_sq", "best"])?;
            for r in &results {
                for (i, p) in r.points.iter().enumerate() {
                    w.write_record([
                        r.algorithm.clone(),
                        format!("{:?}", p.multiplier),
                        format!("{:?}", p.eta),
                        p.score.map_or("diverged".into(), |s| format!("{s:?}")),
                        (i == r.best).to_string(),
                    ])?;
                }
            }
            w.flush()?;
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
