//! Experiment runner for the increment-reordering couplings in
//! [`levy_reorder`]. The `levy-reorder` binary is a thin wrapper around
//! [`run`].

pub mod config;
pub mod error;
pub mod experiments;

use std::path::PathBuf;

pub use config::{Command, ExperimentConfig, Settings};
pub use error::{CliError, CliResult};

/// Runs `command` and returns the files written plus a human summary.
pub fn run(cfg: &ExperimentConfig) -> CliResult<(Vec<PathBuf>, Vec<String>)> {
    use experiments as ex;
    Ok(match cfg.command {
        Command::Couple => {
            let r = ex::couple(cfg)?;
            (r.files, vec![format!("sup distance {:.6}, endpoint error {:.3e}", r.sup, r.endpoint_error)])
        }
        Command::Msmd => {
            let r = ex::msmd(cfg)?;
            (
                r.files,
                vec![
                    format!("rms max distance {:.4} ± {:.4}", r.msmd.rms.mean, r.msmd.rms.std_error),
                    format!("endpoint rmse {:.4} ± {:.4}", r.endpoint_rmse.mean, r.endpoint_rmse.std_error),
                ],
            )
        }
        Command::SweepK | Command::TwoLevel => {
            let r = if cfg.command == Command::SweepK { ex::sweep_k(cfg)? } else { ex::two_level(cfg)? };
            let mut models: Vec<&str> = r.rows.iter().map(|row| row.model.as_str()).collect();
            models.dedup();
            let lines = models
                .iter()
                .filter_map(|m| r.best(m))
                .map(|b| format!("{}: best ks {:?} rms {:.4} ± {:.4}", b.model, b.ks, b.rms.mean, b.rms.std_error))
                .collect();
            (r.files, lines)
        }
        Command::Showcase => {
            let r = ex::showcase(cfg)?;
            (
                r.files,
                vec![
                    format!("rms max distance {:.4} ± {:.4}", r.msmd.rms.mean, r.msmd.rms.std_error),
                    format!("endpoint rmse {:.4} ± {:.4}", r.endpoint_rmse.mean, r.endpoint_rmse.std_error),
                ],
            )
        }
        Command::LimitRegime => {
            let r = ex::limit_regime(cfg)?;
            let mut lines: Vec<String> = r
                .rows
                .iter()
                .map(|row| format!("n={} mu4={:.3e} k*={} d*={:.4}", row.n, row.mu4, row.k_star, row.d_star.mean))
                .collect();
            if r.rows.len() >= 2 {
                let s = r.slopes(cfg.level_min, cfg.level_max)?;
                lines.push(format!("slope ln d*: {:.3} (theory {:.3}); ln k*: {:.3} (theory {:.3})", s[0], s[1], s[2], s[3]));
            }
            (r.files, lines)
        }
        Command::MlmcBench => {
            let r = ex::mlmc_bench(cfg)?;
            let mut lines = Vec::new();
            if cfg.level_max > cfg.level_min {
                for mode in ex::MODES {
                    lines.push(format!("{} log2 variance slope {:.3}", mode.name(), r.variance_slope(mode)?));
                }
            }
            for (mode, delta, res) in &r.runs {
                lines.push(format!(
                    "{} delta={delta}: estimate {:.5} ± {:.5}, {} levels, cost {:.3e}",
                    mode.name(),
                    res.estimate,
                    res.std_error,
                    res.levels.len(),
                    res.total_cost
                ));
            }
            (r.files, lines)
        }
    })
}
