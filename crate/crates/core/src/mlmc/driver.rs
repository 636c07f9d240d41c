//! Multilevel Monte Carlo driver with variance-optimal sample allocation.

use rayon::prelude::*;

use super::functional::Functional;
use super::level::{decompose_level, grid_cells, truncation, MlmcBase, MlmcLevel};
use super::pair::{sample_level_batch, sample_stream, CouplingMode, LevelStats};
use crate::error::{Error, Result};
use crate::rng::{domain, stream};
use crate::scalar::Scalar;
use crate::stats::regression_slope;

/// Tunables of [`mlmc_run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlmcConfig {
    /// Discretization exponent `p` in `m_n = ε_n^{-p}`.
    pub p: f64,
    pub pilot_samples: usize,
    /// Levels always used before the bias test may stop refinement.
    pub min_levels: u32,
    pub max_level: u32,
    /// Endpoint draws cached per level for the reordering coupler.
    pub cache_size: usize,
    pub seed: u64,
}

impl MlmcConfig {
    pub fn new(seed: u64) -> Self {
        Self { p: 1.5, pilot_samples: 200, min_levels: 3, max_level: 10, cache_size: 30_000, seed }
    }
}

/// One row of the per-level table. Level 0 is `g(X_0)` alone; level `l >= 1`
/// is the difference `g(X_l) - g(X_{l-1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRow {
    pub level: u32,
    /// Truncation `ε_l` of the finer approximation.
    pub eps: f64,
    pub k_prime: usize,
    /// Grid cells of the finer approximation.
    pub m_n: usize,
    pub stats: LevelStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlmcResult {
    pub estimate: f64,
    /// `sqrt(Σ V_l / N_l)`.
    pub std_error: f64,
    /// Geometric extrapolation of the remaining bias.
    pub bias_estimate: f64,
    pub levels: Vec<LevelRow>,
    /// `Σ N_l C_l`.
    pub total_cost: f64,
    /// False when `max_level` was reached with the bias test still failing.
    pub converged: bool,
}

/// Samples `g(X_0)` with indices `start..start + count`.
fn sample_base_batch<T: Scalar>(
    base: &MlmcBase,
    g: Functional,
    p: f64,
    seed: u64,
    start: u64,
    count: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let model = base.truncated_approximation(0)?;
    let m = grid_cells(0, p);
    let out: Vec<(f64, f64)> = (start..start + count)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, 0, i);
            let lp = model.sample_levy_path::<T, _>(m, &mut rng)?;
            Ok((g.eval(lp.path().values()), (lp.jump_count() + m + 1) as f64))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().unzip())
}

struct LevelState {
    level: Option<MlmcLevel>,
    diffs: Vec<f64>,
    costs: Vec<f64>,
}

impl LevelState {
    fn stats(&self) -> Result<LevelStats> {
        LevelStats::from_samples(&self.diffs, &self.costs)
    }
}

fn extend<T: Scalar>(
    state: &mut LevelState,
    base: &MlmcBase,
    g: Functional,
    mode: CouplingMode,
    cfg: &MlmcConfig,
    count: usize,
) -> Result<()> {
    let start = state.diffs.len() as u64;
    match &state.level {
        None => {
            let (d, c) = sample_base_batch::<T>(base, g, cfg.p, cfg.seed, start, count as u64)?;
            state.diffs.extend(d);
            state.costs.extend(c);
        }
        Some(level) => {
            let s = sample_level_batch::<T>(level, mode, g, cfg.seed, start, count as u64)?;
            state.diffs.extend(s.iter().map(|p| p.g_fine - p.g_coarse));
            state.costs.extend(s.iter().map(|p| p.cost));
        }
    }
    Ok(())
}

fn new_level(base: &MlmcBase, l: u32, mode: CouplingMode, cfg: &MlmcConfig) -> Result<LevelState> {
    let level = if l == 0 {
        None
    } else {
        let lv = decompose_level(base, l - 1, cfg.p)?;
        Some(match mode {
            CouplingMode::Reordering => {
                let mut rng = stream(cfg.seed, domain::MLMC_CACHE, u64::from(l));
                lv.with_endpoint_cache(cfg.cache_size, &mut rng)?
            }
            CouplingMode::Independent => lv,
        })
    };
    Ok(LevelState { level, diffs: Vec::new(), costs: Vec::new() })
}

/// Remaining bias from the last two level means, assuming geometric decay
/// at the rate fitted to all levels `>= 1` (at least 2^-0.5 per level).
/// Two points give too noisy a fit, so the floor rate is used until there are three.
fn bias_proxy(means: &[f64]) -> f64 {
    let last = means.len() - 1;
    if last == 0 {
        return f64::INFINITY;
    }
    let xs: Vec<f64> = (1..=last).map(|l| l as f64).collect();
    let ys: Vec<f64> = means[1..].iter().map(|m| m.abs().max(1e-300).log2()).collect();
    let rate = if xs.len() >= 3 { (-regression_slope(&xs, &ys).unwrap_or(-0.5)).max(0.5) } else { 0.5 };
    let factor = 2f64.powf(rate);
    let mut bias = means[last].abs() / (factor - 1.0);
    if last >= 2 {
        bias = bias.max(means[last - 1].abs() / factor / (factor - 1.0));
    }
    bias
}

/// Estimates `E g(X)` to root mean square error `delta`.
pub fn mlmc_run<T: Scalar>(
    base: &MlmcBase,
    g: Functional,
    mode: CouplingMode,
    delta: f64,
    cfg: &MlmcConfig,
) -> Result<MlmcResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("target error {delta} must be positive")));
    }
    if cfg.pilot_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 pilot samples".into()));
    }
    base.validate()?;
    let mut states: Vec<LevelState> = Vec::new();
    for l in 0..cfg.min_levels.min(cfg.max_level + 1).max(1) {
        let mut s = new_level(base, l, mode, cfg)?;
        extend::<T>(&mut s, base, g, mode, cfg, cfg.pilot_samples)?;
        states.push(s);
    }
    let mut converged;
    loop {
        // Allocate N_l ∝ sqrt(V_l / C_l) for variance delta²/2.
        loop {
            let stats: Vec<LevelStats> = states.iter().map(LevelState::stats).collect::<Result<_>>()?;
            let total: f64 = stats.iter().map(|s| (s.var_diff * s.cost).sqrt()).sum();
            let mut added = false;
            for (state, s) in states.iter_mut().zip(&stats) {
                let target = (2.0 / (delta * delta) * (s.var_diff / s.cost).sqrt() * total).ceil() as usize;
                if target > state.diffs.len() {
                    let extra = target - state.diffs.len();
                    extend::<T>(state, base, g, mode, cfg, extra)?;
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
        let means: Vec<f64> = states.iter().map(|s| s.stats().map(|x| x.mean_diff)).collect::<Result<_>>()?;
        converged = bias_proxy(&means) < delta / 2f64.sqrt();
        let next = states.len() as u32;
        if converged || next > cfg.max_level {
            break;
        }
        let mut s = new_level(base, next, mode, cfg)?;
        extend::<T>(&mut s, base, g, mode, cfg, cfg.pilot_samples)?;
        states.push(s);
    }
    if !converged {
        log::warn!("bias test still failing at maximal level {}", cfg.max_level);
    }

    let mut levels = Vec::with_capacity(states.len());
    let (mut estimate, mut variance, mut total_cost) = (0.0, 0.0, 0.0);
    for (l, state) in states.iter().enumerate() {
        let stats = state.stats()?;
        estimate += stats.mean_diff;
        variance += stats.var_diff / stats.n_samples as f64;
        total_cost += stats.cost * stats.n_samples as f64;
        let (k_prime, m_n) = match &state.level {
            None => (0, grid_cells(0, cfg.p)),
            Some(lv) => (if mode == CouplingMode::Reordering { lv.spec.k_prime } else { 0 }, lv.spec.m_fine),
        };
        levels.push(LevelRow { level: l as u32, eps: truncation(l as u32), k_prime, m_n, stats });
    }
    let means: Vec<f64> = levels.iter().map(|r| r.stats.mean_diff).collect();
    Ok(MlmcResult {
        estimate,
        std_error: variance.sqrt(),
        bias_estimate: bias_proxy(&means),
        levels,
        total_cost,
        converged,
    })
}
