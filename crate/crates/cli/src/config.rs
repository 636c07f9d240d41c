//! Experiment configuration: command-line flags layered over an optional
//! flat TOML file.
//!
//! File keys are the long flag names with `-` replaced by `_`, e.g.
//!
//! ```toml
//! model = "exp-stable(0.1,0.03)"
//! ks = [64, 16]
//! q = 12
//! reps = 1000
//! endpoint_samples = 30000
//! seed = 7
//! out = "results"
//! ```

use std::path::{Path, PathBuf};

use clap::Args;
use levy_reorder::levy::{parse_preset, LevyModelSpec};
use levy_reorder::mlmc::Functional;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Settings shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Model preset, e.g. exp-stable(0.1,0.03), annulus(4), perturbed(0.5), fig1-gamma, cpp-atoms, brownian
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Outer truncation of the stable preset (used when --model is absent)
    #[arg(long, global = true)]
    pub eps1: Option<f64>,
    /// Inner truncation of the stable preset (used when --model is absent)
    #[arg(long, global = true)]
    pub eps2: Option<f64>,
    /// Number of reordered increments
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Level sizes of the hierarchical coupling, e.g. 64,16
    #[arg(long, global = true, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    /// Values of k swept by sweep-k, two-level and limit-regime
    #[arg(long, global = true, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    /// Second-level sizes of two-level
    #[arg(long, global = true, value_delimiter = ',')]
    pub k2s: Option<Vec<usize>>,
    /// Fine grid has 2^q cells [default: 12]
    #[arg(long, global = true)]
    pub q: Option<u32>,
    /// Replications per estimate [default: 1000]
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Draws of X(1) behind the empirical endpoint law [default: 30000]
    #[arg(long, global = true)]
    pub endpoint_samples: Option<usize>,
    /// Seed of all random streams (required)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: results]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// First level of limit-regime / mlmc-bench
    #[arg(long, global = true)]
    pub level_min: Option<u32>,
    /// Last level of limit-regime / mlmc-bench
    #[arg(long, global = true)]
    pub level_max: Option<u32>,
    /// Samples per level in mlmc-bench [default: 4000]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// terminal, supremum or integral [default: supremum]
    #[arg(long, global = true)]
    pub functional: Option<String>,
    /// Target errors of full multilevel runs in mlmc-bench
    #[arg(long, global = true, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Discretization exponent p in m_n = eps_n^-p [default: 1.5]
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Deepest level a multilevel run may add [default: 10]
    #[arg(long, global = true)]
    pub max_level: Option<u32>,
}

impl Settings {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `file`.
    pub fn over(self, file: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: self.$f.or(file.$f)),* } };
        }
        pick!(
            model, eps1, eps2, k, ks, sweep, k2s, q, reps, endpoint_samples, seed, out, level_min, level_max,
            samples, functional, deltas, p, max_level
        )
    }
}

/// Which experiment a configuration is for; selects defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Couple,
    Msmd,
    SweepK,
    TwoLevel,
    Showcase,
    LimitRegime,
    MlmcBench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Couple => "couple",
            Command::Msmd => "msmd",
            Command::SweepK => "sweep-k",
            Command::TwoLevel => "two-level",
            Command::Showcase => "showcase",
            Command::LimitRegime => "limit-regime",
            Command::MlmcBench => "mlmc-bench",
        }
    }
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Model preset text given explicitly (via --model or --eps1/--eps2).
    pub model: Option<String>,
    pub ks: Vec<usize>,
    pub sweep: Vec<usize>,
    pub k2s: Vec<usize>,
    pub q: u32,
    pub reps: usize,
    pub endpoint_samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub level_min: u32,
    pub level_max: u32,
    pub samples: usize,
    pub functional: Functional,
    pub deltas: Vec<f64>,
    pub p: f64,
    pub max_level: u32,
}

pub const DEFAULT_MODEL: &str = "exp-stable(0.1,0.03)";

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn resolve(command: Command, s: Settings) -> CliResult<Self> {
        let Some(seed) = s.seed else {
            return config_err("--seed is required");
        };
        let q = s.q.unwrap_or(12);
        if !(1..=24).contains(&q) {
            return config_err(format!("q = {q} outside 1..=24"));
        }
        let model = match (s.model, s.eps1, s.eps2) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return config_err("give either --model or --eps1/--eps2, not both")
            }
            (Some(m), None, None) => Some(m),
            (None, Some(e1), Some(e2)) => Some(format!("exp-stable({e1},{e2})")),
            (None, None, None) => None,
            _ => return config_err("--eps1 and --eps2 must be given together"),
        };
        if let Some(m) = &model {
            parse_preset(m)?;
        }
        let ks = match (s.ks, s.k) {
            (Some(_), Some(_)) => return config_err("give either --k or --ks, not both"),
            (Some(ks), None) => ks,
            (None, Some(k)) => vec![k],
            (None, None) => vec![128],
        };
        if ks.is_empty() || ks.contains(&0) {
            return config_err("level sizes must be positive");
        }
        let cells = 1usize << q;
        let sweep = s.sweep.unwrap_or_else(|| (0..=q).map(|e| 1usize << e).collect());
        if sweep.is_empty() || sweep.iter().any(|&k| k == 0 || !cells.is_multiple_of(k)) {
            return config_err(format!("every swept k must divide 2^{q}"));
        }
        let k2s = s.k2s.unwrap_or_else(|| vec![1, 4, 16]);
        if k2s.is_empty() || k2s.iter().any(|&k| k == 0 || !cells.is_multiple_of(k)) {
            return config_err(format!("every k2 must divide 2^{q}"));
        }
        let reps = s.reps.unwrap_or(1000);
        if reps < 2 {
            return config_err("--reps must be at least 2");
        }
        let endpoint_samples = s.endpoint_samples.unwrap_or(30_000);
        if endpoint_samples == 0 {
            return config_err("--endpoint-samples must be positive");
        }
        let (lmin, lmax) = match command {
            Command::LimitRegime => (1, 8),
            _ => (3, 6),
        };
        let level_min = s.level_min.unwrap_or(lmin);
        let level_max = s.level_max.unwrap_or(lmax);
        if level_min > level_max || level_max > 30 {
            return config_err(format!("level range {level_min}..={level_max} is invalid"));
        }
        if command == Command::LimitRegime && level_min == 0 {
            return config_err("limit-regime levels start at 1");
        }
        let samples = s.samples.unwrap_or(4000);
        if samples < 2 {
            return config_err("--samples must be at least 2");
        }
        let functional = match s.functional.as_deref() {
            None => Functional::Supremum,
            Some(f) => match Functional::parse(f) {
                Some(g) => g,
                None => return config_err(format!("unknown functional '{f}'")),
            },
        };
        let deltas = s.deltas.unwrap_or_default();
        if deltas.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return config_err("target errors must be positive");
        }
        let p = s.p.unwrap_or(1.5);
        if !(p > 0.0 && p <= 4.0) {
            return config_err(format!("p = {p} outside (0, 4]"));
        }
        Ok(Self {
            command,
            model,
            ks,
            sweep,
            k2s,
            q,
            reps,
            endpoint_samples,
            seed,
            out: s.out.unwrap_or_else(|| PathBuf::from("results")),
            level_min,
            level_max,
            samples,
            functional,
            deltas,
            p,
            max_level: s.max_level.unwrap_or(10),
        })
    }

    pub fn model_text(&self) -> &str {
        self.model.as_deref().unwrap_or(DEFAULT_MODEL)
    }

    pub fn model_spec(&self) -> CliResult<LevyModelSpec> {
        Ok(parse_preset(self.model_text())?)
    }

    /// One-line echo of every setting, written at the top of each CSV.
    pub fn echo(&self) -> String {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let deltas = self.deltas.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        format!(
            "command={} model={} ks={} sweep={} k2s={} q={} reps={} endpoint_samples={} seed={} \
             level_min={} level_max={} samples={} functional={} deltas={} p={} max_level={}",
            self.command.name(),
            self.model.as_deref().unwrap_or("default"),
            list(&self.ks),
            list(&self.sweep),
            list(&self.k2s),
            self.q,
            self.reps,
            self.endpoint_samples,
            self.seed,
            self.level_min,
            self.level_max,
            self.samples,
            self.functional.name(),
            deltas,
            self.p,
            self.max_level,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded() -> Settings {
        Settings { seed: Some(1), ..Settings::default() }
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::resolve(Command::Msmd, seeded()).unwrap();
        assert_eq!((c.q, c.reps, c.endpoint_samples, c.ks.clone()), (12, 1000, 30_000, vec![128]));
        assert_eq!(c.sweep.len(), 13);
        assert_eq!(c.model_text(), DEFAULT_MODEL);
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(ExperimentConfig::resolve(Command::Msmd, Settings::default()).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: Settings = toml::from_str("q = 10\nreps = 50\nseed = 3\nks = [8, 4]").unwrap();
        let flags = Settings { reps: Some(20), ..Settings::default() };
        let c = ExperimentConfig::resolve(Command::Msmd, flags.over(file)).unwrap();
        assert_eq!((c.q, c.reps, c.seed, c.ks), (10, 20, 3, vec![8, 4]));
    }

    #[test]
    fn rejects_conflicts_and_unknown_keys() {
        let s = Settings { model: Some("brownian".into()), eps1: Some(0.1), ..seeded() };
        assert!(ExperimentConfig::resolve(Command::Msmd, s).is_err());
        let s = Settings { model: Some("nope".into()), ..seeded() };
        assert!(ExperimentConfig::resolve(Command::Msmd, s).is_err());
        assert!(toml::from_str::<Settings>("bogus = 1").is_err());
        let s = Settings { eps1: Some(1.0), eps2: Some(0.01), ..seeded() };
        let c = ExperimentConfig::resolve(Command::Msmd, s).unwrap();
        assert_eq!(c.model_text(), "exp-stable(1,0.01)");
    }
}
