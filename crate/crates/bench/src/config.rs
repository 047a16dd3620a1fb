//! TOML experiment configuration.
//!
//! A file names a preset and may override any of its problem parameters, run
//! settings or the algorithm list:
//!
//! ```toml
//! [problem]
//! preset = "game-exp1"
//! m = 5                 # overrides the preset's m
//!
//! [run]
//! seeds = [0, 1, 2]
//! epochs = 50
//! probe_fraction = 0.5
//!
//! [[algorithm]]
//! name = "vfog-saga"
//! eta_scale = 0.125     # η = 0.125 · base(L, p)
//!
//! [gridsearch]
//! points = 13
//! pilot_epochs = 5
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, rename = "algorithm")]
    pub algorithms: Vec<AlgoSpec>,
    #[serde(default)]
    pub gridsearch: GridSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub preset: String,
    /// Matrix game: grid side (`p₁ = m²`) and number of noisy samples.
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub noise_sigma2: Option<f64>,
    /// MDP: states, actions, reachable next states, discount.
    pub states: Option<usize>,
    pub actions: Option<usize>,
    pub branching: Option<usize>,
    pub discount: Option<f64>,
    /// `"max-block"` or `"full"`.
    pub block_norm: Option<String>,
    /// Linear families: dimension, components, perturbation size.
    pub dim: Option<usize>,
    pub components: Option<usize>,
    pub spread: Option<f64>,
    /// Replaces the computed Lipschitz constant.
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Used in file names and the `instance_id` column; defaults to the preset.
    pub name: Option<String>,
    pub seeds: Option<Vec<u64>>,
    pub epochs: Option<f64>,
    pub iterations: Option<usize>,
    pub target_residual: Option<f64>,
    pub probe_fraction: Option<f64>,
    pub probe_every: Option<usize>,
    #[serde(default)]
    pub timing: bool,
    pub fb_lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoName {
    VfogExact,
    VfogSgd,
    VfogSvrg,
    VfogSaga,
    VfogSarah,
    Og,
    Vreg,
    Vrfrbs,
}

impl AlgoName {
    pub const ALL: [AlgoName; 8] = [
        AlgoName::VfogExact,
        AlgoName::VfogSgd,
        AlgoName::VfogSvrg,
        AlgoName::VfogSaga,
        AlgoName::VfogSarah,
        AlgoName::Og,
        AlgoName::Vreg,
        AlgoName::Vrfrbs,
    ];

    /// Legend name used in the CSV `algorithm` column.
    pub fn label(self) -> &'static str {
        match self {
            AlgoName::VfogExact => "VFOG-Exact",
            AlgoName::VfogSgd => "VFOG-Sgd",
            AlgoName::VfogSvrg => "VFOG-Svrg",
            AlgoName::VfogSaga => "VFOG-Saga",
            AlgoName::VfogSarah => "VFOG-Sarah",
            AlgoName::Og => "OG",
            AlgoName::Vreg => "VrEG",
            AlgoName::Vrfrbs => "VrFRBS",
        }
    }

    pub fn is_vfog(self) -> bool {
        matches!(
            self,
            AlgoName::VfogExact | AlgoName::VfogSgd | AlgoName::VfogSvrg | AlgoName::VfogSaga | AlgoName::VfogSarah
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoSpec {
    pub name: AlgoName,
    pub label: Option<String>,
    pub s: Option<f64>,
    /// Absolute stepsize; wins over `eta_scale`.
    pub eta: Option<f64>,
    /// Multiplier on the method's base stepsize rule.
    pub eta_scale: Option<f64>,
    pub rho_n: Option<f64>,
    pub rho_c: Option<f64>,
    pub p: Option<f64>,
    pub b: Option<usize>,
    /// Scales the default `p` and `b` (0.5 halves both).
    pub pb_scale: Option<f64>,
    /// VFOG-Sgd: `b = max{sgd_min, min{⌊sgd_coef·(l+1)³⌋, n}}`.
    pub sgd_coef: Option<f64>,
    pub sgd_min: Option<usize>,
    pub with_replacement: Option<bool>,
}

impl AlgoSpec {
    pub fn new(name: AlgoName) -> Self {
        Self {
            name,
            label: None,
            s: None,
            eta: None,
            eta_scale: None,
            rho_n: None,
            rho_c: None,
            p: None,
            b: None,
            pb_scale: None,
            sgd_coef: None,
            sgd_min: None,
            with_replacement: None,
        }
    }

    pub fn scaled(name: AlgoName, eta_scale: f64) -> Self {
        Self { eta_scale: Some(eta_scale), ..Self::new(name) }
    }

    pub fn display(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.label().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub pilot_epochs: f64,
    /// Seeds averaged per grid point; the first run seed when empty.
    pub seeds: Vec<u64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { lo: 1e-5, hi: 10.0, points: 13, pilot_epochs: 5.0, seeds: Vec::new() }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).context("invalid config")?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// A config that only names a preset.
    pub fn from_preset(name: &str) -> Self {
        Config {
            problem: ProblemSection { preset: name.to_string(), ..ProblemSection::default() },
            run: RunSection::default(),
            algorithms: Vec::new(),
            gridsearch: GridSection::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if let Some(seeds) = &self.run.seeds {
            if seeds.is_empty() {
                bail!("run.seeds must not be empty");
            }
        }
        if let Some(e) = self.run.epochs {
            if !(e >= 0.0) || !e.is_finite() {
                bail!("run.epochs must be a nonnegative number, got {e}");
            }
        }
        if self.run.probe_fraction.is_some() && self.run.probe_every.is_some() {
            bail!("set at most one of run.probe_fraction and run.probe_every");
        }
        if let Some(f) = self.run.probe_fraction {
            if !(f > 0.0) {
                bail!("run.probe_fraction must be positive, got {f}");
            }
        }
        let g = &self.gridsearch;
        if !(g.lo > 0.0 && g.hi >= g.lo) || g.points == 0 {
            bail!("gridsearch needs 0 < lo <= hi and at least one point");
        }
        if !(g.pilot_epochs > 0.0) {
            bail!("gridsearch.pilot_epochs must be positive");
        }
        for a in &self.algorithms {
            for (key, v) in [("eta", a.eta), ("eta_scale", a.eta_scale), ("pb_scale", a.pb_scale), ("sgd_coef", a.sgd_coef)] {
                if let Some(v) = v {
                    if !(v > 0.0) || !v.is_finite() {
                        bail!("{}: {key} must be positive, got {v}", a.display());
                    }
                }
            }
            if let Some(p) = a.p {
                if !(p > 0.0 && p <= 1.0) {
                    bail!("{}: p must lie in (0, 1], got {p}", a.display());
                }
            }
            if a.b == Some(0) {
                bail!("{}: b must be at least 1", a.display());
            }
        }
        Ok(())
    }
}
