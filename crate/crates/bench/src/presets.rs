//! Named experiment presets and the resolution of a config against them.

use anyhow::{bail, Context, Result};
use vfog_core::problems::{
    build_linear_example1, build_linear_identity, build_linear_random, build_matrix_game, build_mdp, BlockNorm,
    LinearProblem,
};
use vfog_core::solver::{constants_vr, Budget, ProbeCadence, RunOptions};
use vfog_core::Problem;

use crate::config::{AlgoName, AlgoSpec, Config, GridSection};

pub const PRESETS: [(&str, &str); 7] = [
    ("game-exp1", "matrix game, m = 10, n = 1000 (p = 200), 7 algorithms, 200 epochs"),
    ("game-exp2", "matrix game, m = 15, n = 2000 (p = 450), 7 algorithms, 200 epochs"),
    ("mdp-exp1", "garnet MDP (2000, 5, 1000, 0.9), p = 12000, 6 algorithms"),
    ("mdp-exp2", "garnet MDP (4000, 10, 2000, 0.9), p = 44000, 6 algorithms"),
    ("linear-exam1", "two-component nonmonotone 2x2 example with linear T"),
    ("linear-random", "monotone affine finite sum, p = 50, n = 20, known solution"),
    ("linear-identity", "identity components (monotone), for certify"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Game { m: usize, n: usize, theta: f64, noise_sigma2: f64 },
    Mdp { states: usize, actions: usize, branching: usize, discount: f64, block_norm: BlockNorm },
    LinearExam1,
    LinearRandom { dim: usize, components: usize, spread: f64 },
    LinearIdentity { dim: usize, components: usize },
}

impl ProblemSpec {
    /// The linear instance for `seed`, if this is a linear family.
    pub fn linear(&self, seed: u64) -> Option<LinearProblem> {
        match *self {
            ProblemSpec::LinearExam1 => Some(build_linear_example1()),
            ProblemSpec::LinearRandom { dim, components, spread } => {
                Some(build_linear_random(dim, components, spread, seed))
            }
            ProblemSpec::LinearIdentity { dim, components } => Some(build_linear_identity(dim, components)),
            _ => None,
        }
    }

    pub fn build(&self, name: &str, seed: u64, lipschitz: Option<f64>) -> Result<Problem> {
        let mut problem = match *self {
            ProblemSpec::Game { m, n, theta, noise_sigma2 } => {
                if m < 2 || n == 0 {
                    bail!("matrix game needs m >= 2 and n >= 1");
                }
                build_matrix_game(m, n, theta, noise_sigma2, seed).into_problem(name)
            }
            ProblemSpec::Mdp { states, actions, branching, discount, block_norm } => {
                build_mdp(states, actions, branching, discount, seed)?.into_problem(name, block_norm)
            }
            _ => self.linear(seed).expect("linear family").into_problem(name),
        };
        if let Some(l) = lipschitz {
            problem.meta.lipschitz = l;
        }
        problem.meta.validate()?;
        Ok(problem)
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub problem: ProblemSpec,
    pub lipschitz: Option<f64>,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    pub options: RunOptions,
    pub algorithms: Vec<AlgoSpec>,
    pub grid: GridSection,
}

fn seeds_0_to_9() -> Vec<u64> {
    (0..10).collect()
}

fn game_algorithms() -> Vec<AlgoSpec> {
    let mut v = vec![AlgoSpec::new(AlgoName::Og), AlgoSpec::new(AlgoName::Vrfrbs), AlgoSpec::new(AlgoName::Vreg)];
    for name in [AlgoName::VfogSgd, AlgoName::VfogSvrg, AlgoName::VfogSaga, AlgoName::VfogSarah] {
        v.push(AlgoSpec { s: Some(3.0), ..AlgoSpec::scaled(name, 0.125) });
    }
    v
}

// stepsizes selected by the grid search of the MDP experiments
fn mdp_algorithms() -> Vec<AlgoSpec> {
    let mut v = vec![
        AlgoSpec::scaled(AlgoName::Og, 1e-2),
        AlgoSpec::scaled(AlgoName::Vrfrbs, 1e-2),
        AlgoSpec::scaled(AlgoName::Vreg, 1e-3),
    ];
    for name in [AlgoName::VfogSvrg, AlgoName::VfogSaga, AlgoName::VfogSarah] {
        v.push(AlgoSpec { s: Some(3.0), ..AlgoSpec::scaled(name, 1e-3) });
    }
    v
}

fn preset(name: &str) -> Result<(ProblemSpec, Vec<u64>, Budget, Vec<AlgoSpec>)> {
    let game = |m, n| ProblemSpec::Game { m, n, theta: 0.8, noise_sigma2: 0.05 };
    let mdp = |states, actions, branching| ProblemSpec::Mdp {
        states,
        actions,
        branching,
        discount: 0.9,
        block_norm: BlockNorm::MaxBlock,
    };
    Ok(match name {
        "game-exp1" => (game(10, 1000), seeds_0_to_9(), Budget::epochs(200.0), game_algorithms()),
        "game-exp2" => (game(15, 2000), seeds_0_to_9(), Budget::epochs(200.0), game_algorithms()),
        "mdp-exp1" => (mdp(2000, 5, 1000), seeds_0_to_9(), Budget::epochs(50.0), mdp_algorithms()),
        "mdp-exp2" => (mdp(4000, 10, 2000), seeds_0_to_9(), Budget::epochs(50.0), mdp_algorithms()),
        "linear-exam1" => (
            ProblemSpec::LinearExam1,
            vec![0],
            Budget::iterations(1000),
            vec![AlgoSpec { s: Some(5.0), eta: Some(0.05), ..AlgoSpec::new(AlgoName::VfogExact) }],
        ),
        "linear-random" => {
            let lam = constants_vr(5.0, 0.0, 1.0)?.lambda;
            (
                ProblemSpec::LinearRandom { dim: 50, components: 20, spread: 0.5 },
                vec![0],
                Budget::iterations(10_000),
                vec![
                    AlgoSpec { s: Some(5.0), ..AlgoSpec::scaled(AlgoName::VfogExact, 0.9 * lam) },
                    AlgoSpec::scaled(AlgoName::Og, 0.5),
                ],
            )
        }
        "linear-identity" => (
            ProblemSpec::LinearIdentity { dim: 3, components: 2 },
            vec![0],
            Budget::iterations(100),
            vec![AlgoSpec { s: Some(3.0), ..AlgoSpec::scaled(AlgoName::VfogExact, 0.125) }],
        ),
        other => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            bail!("unknown preset {other:?}; known presets: {}", names.join(", "))
        }
    })
}

fn apply_overrides(spec: &mut ProblemSpec, cfg: &Config) -> Result<()> {
    let p = &cfg.problem;
    let mut foreign = Vec::new();
    match spec {
        ProblemSpec::Game { m, n, theta, noise_sigma2 } => {
            if let Some(v) = p.m {
                *m = v;
            }
            if let Some(v) = p.n {
                *n = v;
            }
            if let Some(v) = p.theta {
                *theta = v;
            }
            if let Some(v) = p.noise_sigma2 {
                *noise_sigma2 = v;
            }
            foreign.extend(["states", "actions", "branching", "discount", "block_norm", "dim", "components", "spread"]);
        }
        ProblemSpec::Mdp { states, actions, branching, discount, block_norm } => {
            if let Some(v) = p.states {
                *states = v;
            }
            if let Some(v) = p.actions {
                *actions = v;
            }
            if let Some(v) = p.branching {
                *branching = v;
            }
            if let Some(v) = p.discount {
                *discount = v;
            }
            if let Some(v) = &p.block_norm {
                *block_norm = match v.as_str() {
                    "max-block" => BlockNorm::MaxBlock,
                    "full" => BlockNorm::Full,
                    other => bail!("block_norm must be \"max-block\" or \"full\", got {other:?}"),
                };
            }
            foreign.extend(["m", "n", "theta", "noise_sigma2", "dim", "components", "spread"]);
        }
        ProblemSpec::LinearRandom { dim, components, spread } => {
            if let Some(v) = p.dim {
                *dim = v;
            }
            if let Some(v) = p.components {
                *components = v;
            }
            if let Some(v) = p.spread {
                *spread = v;
            }
            foreign.extend(["m", "n", "theta", "noise_sigma2", "states", "actions", "branching", "discount", "block_norm"]);
        }
        ProblemSpec::LinearIdentity { dim, components } => {
            if let Some(v) = p.dim {
                *dim = v;
            }
            if let Some(v) = p.components {
                *components = v;
            }
            foreign.extend(["m", "n", "theta", "noise_sigma2", "states", "actions", "branching", "discount", "block_norm", "spread"]);
        }
        ProblemSpec::LinearExam1 => {
            foreign.extend(["m", "n", "theta", "noise_sigma2", "states", "actions", "branching", "discount", "block_norm", "dim", "components", "spread"]);
        }
    }
    let set = [
        ("m", p.m.is_some()),
        ("n", p.n.is_some()),
        ("theta", p.theta.is_some()),
        ("noise_sigma2", p.noise_sigma2.is_some()),
        ("states", p.states.is_some()),
        ("actions", p.actions.is_some()),
        ("branching", p.branching.is_some()),
        ("discount", p.discount.is_some()),
        ("block_norm", p.block_norm.is_some()),
        ("dim", p.dim.is_some()),
        ("components", p.components.is_some()),
        ("spread", p.spread.is_some()),
    ];
    for (key, is_set) in set {
        if is_set && foreign.contains(&key) {
            bail!("problem.{key} does not apply to preset {:?}", p.preset);
        }
    }
    Ok(())
}

/// Merge `cfg` into its preset. `seed_offset` is added to every seed.
pub fn resolve(cfg: &Config, seed_offset: u64) -> Result<Experiment> {
    let (mut spec, seeds, budget, algorithms) =
        preset(&cfg.problem.preset).with_context(|| "resolving [problem]".to_string())?;
    apply_overrides(&mut spec, cfg)?;
    let r = &cfg.run;
    let seeds: Vec<u64> = r.seeds.clone().unwrap_or(seeds).into_iter().map(|s| s + seed_offset).collect();
    let budget = if r.epochs.is_some() || r.iterations.is_some() || r.target_residual.is_some() {
        let mut b = if r.epochs.is_some() || r.iterations.is_some() { Budget::default() } else { budget };
        b.max_epochs = r.epochs.or(b.max_epochs);
        b.max_iterations = r.iterations.or(b.max_iterations);
        b.target_residual = r.target_residual;
        b
    } else {
        budget
    };
    let probe = match (r.probe_fraction, r.probe_every) {
        (_, Some(k)) => ProbeCadence::EveryIterations(k),
        (Some(f), _) => ProbeCadence::EpochFraction(f),
        (None, None) => ProbeCadence::EpochFraction(1.0),
    };
    let algorithms = if cfg.algorithms.is_empty() { algorithms } else { cfg.algorithms.clone() };
    let mut grid = cfg.gridsearch.clone();
    if grid.seeds.is_empty() {
        grid.seeds = vec![seeds[0]];
    }
    Ok(Experiment {
        name: r.name.clone().unwrap_or_else(|| cfg.problem.preset.clone()),
        problem: spec,
        lipschitz: cfg.problem.lipschitz,
        seeds,
        budget,
        options: RunOptions { probe, timing: r.timing, fb_lambda: r.fb_lambda },
        algorithms,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_exp1_shape() {
        let e = resolve(&Config::from_preset("game-exp1"), 0).unwrap();
        assert_eq!(e.algorithms.len(), 7);
        assert_eq!(e.seeds, (0..10).collect::<Vec<_>>());
        assert_eq!(e.budget.max_epochs, Some(200.0));
        assert_eq!(e.problem, ProblemSpec::Game { m: 10, n: 1000, theta: 0.8, noise_sigma2: 0.05 });
    }

    #[test]
    fn overrides_and_offsets() {
        let cfg = Config::parse("[problem]\npreset = \"game-exp1\"\nm = 3\nn = 20\n[run]\nseeds = [1]\nepochs = 2\n").unwrap();
        let e = resolve(&cfg, 5).unwrap();
        assert_eq!(e.seeds, vec![6]);
        assert_eq!(e.problem, ProblemSpec::Game { m: 3, n: 20, theta: 0.8, noise_sigma2: 0.05 });
        assert_eq!(e.budget.max_epochs, Some(2.0));
        let bad = Config::parse("[problem]\npreset = \"game-exp1\"\nstates = 3\n").unwrap();
        assert!(resolve(&bad, 0).is_err());
        assert!(resolve(&Config::from_preset("nope"), 0).is_err());
    }

    #[test]
    fn every_preset_resolves() {
        for (name, _) in PRESETS {
            resolve(&Config::from_preset(name), 0).unwrap();
        }
    }
}
