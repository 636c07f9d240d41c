//! Coupled pairs `(X_n, X_{n+1})` and their level statistics.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functional::Functional;
use super::level::MlmcLevel;
use crate::coupling::couple_path;
use crate::error::{Error, Result};
use crate::levy::FinePath;
use crate::rng::{domain, stream};
use crate::scalar::Scalar;
use crate::stats::mean_var;

/// How the Brownian motion replacing the annulus martingale is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// A fresh Brownian motion independent of the annulus jumps.
    Independent,
    /// The reordering coupling applied to the standardized annulus martingale.
    Reordering,
}

impl CouplingMode {
    pub fn name(self) -> &'static str {
        match self {
            CouplingMode::Independent => "independent",
            CouplingMode::Reordering => "reordering",
        }
    }
}

/// One draw of the level difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSample {
    pub g_fine: f64,
    pub g_coarse: f64,
    /// Jumps drawn, grid points touched and `k' log2 k'` for the sort.
    pub cost: f64,
}

fn skeleton<T: Scalar>(values: &[T], cells: usize) -> Vec<T> {
    let step = (values.len() - 1) / cells;
    values.iter().step_by(step).copied().collect()
}

/// Samples `X_{n+1}` on its grid of `m_fine` cells and `X_n` on its grid of
/// `m_n` cells, sharing the remainder `R'_n`.
///
/// Draw order: remainder path, annulus path, then either the normals of the
/// independent Brownian motion or the draws of the reordering coupler.
pub fn sample_coupled_pair<T: Scalar, R: Rng + ?Sized>(
    level: &MlmcLevel,
    mode: CouplingMode,
    g: Functional,
    rng: &mut R,
) -> Result<PairSample> {
    let spec = &level.spec;
    let m = spec.m_fine;
    let rem = level.remainder.sample_levy_path::<T, R>(m, rng)?;
    let mut cost = (rem.jump_count() + m + 1) as f64;
    let Some(annulus) = &level.annulus else {
        let fine = rem.path().values();
        return Ok(PairSample {
            g_fine: g.eval(fine),
            g_coarse: g.eval(&skeleton(fine, spec.m_n)),
            cost,
        });
    };
    let sigma = T::lit(spec.sigma_prime_sq.sqrt());
    let ann = annulus.sample_levy_path::<T, R>(m, rng)?;
    cost += ann.jump_count() as f64;
    let fine: Vec<T> = rem.path().values().iter().zip(ann.path().values()).map(|(&r, &a)| r + sigma * a).collect();

    let w: FinePath<T> = match mode {
        CouplingMode::Independent => {
            let sd = (1.0 / m as f64).sqrt();
            let mut acc = T::zero();
            let mut v = Vec::with_capacity(m + 1);
            v.push(acc);
            for _ in 0..m {
                let z: f64 = StandardNormal.sample(rng);
                acc += T::lit(sd * z);
                v.push(acc);
            }
            FinePath::new(v)?
        }
        CouplingMode::Reordering => {
            let cache = level
                .endpoint_cache
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("reordering mode needs an endpoint cache".into()))?;
            let k = spec.k_prime;
            cost += k as f64 * (k as f64).log2();
            couple_path(ann, &[k], cache, rng)?.w
        }
    };
    let coarse: Vec<T> = rem.path().values().iter().zip(w.values()).map(|(&r, &b)| r + sigma * b).collect();
    Ok(PairSample { g_fine: g.eval(&fine), g_coarse: g.eval(&skeleton(&coarse, spec.m_n)), cost })
}

/// Statistics of `g(X_{n+1}) - g(X_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub mean_diff: f64,
    pub var_diff: f64,
    /// Standard error of `var_diff` (normal-theory, from the fourth central moment).
    pub var_std_error: f64,
    /// Average cost per sample.
    pub cost: f64,
    pub n_samples: usize,
}

impl LevelStats {
    pub fn from_samples(diffs: &[f64], costs: &[f64]) -> Result<Self> {
        if diffs.len() < 2 {
            return Err(Error::InvalidArgument("level statistics need at least 2 samples".into()));
        }
        let n = diffs.len() as f64;
        let (mean_diff, var_diff) = mean_var(diffs);
        let m4 = diffs.iter().map(|d| (d - mean_diff).powi(4)).sum::<f64>() / n;
        let var_std_error = ((m4 - var_diff * var_diff).max(0.0) / n).sqrt();
        let (cost, _) = mean_var(costs);
        Ok(Self { mean_diff, var_diff, var_std_error, cost, n_samples: diffs.len() })
    }
}

/// Stream of sample `index` at MLMC level `level`.
pub(crate) fn sample_stream(seed: u64, level: u32, index: u64) -> crate::rng::SimRng {
    stream(seed, domain::MLMC_LEVEL, (u64::from(level) << 40) | index)
}

/// Draws samples `start..start + count` of the level difference in parallel.
pub fn sample_level_batch<T: Scalar>(
    level: &MlmcLevel,
    mode: CouplingMode,
    g: Functional,
    seed: u64,
    start: u64,
    count: u64,
) -> Result<Vec<PairSample>> {
    (start..start + count)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, level.spec.n + 1, i);
            sample_coupled_pair::<T, _>(level, mode, g, &mut rng)
        })
        .collect()
}

pub fn estimate_level_stats<T: Scalar>(
    level: &MlmcLevel,
    mode: CouplingMode,
    g: Functional,
    n_samples: usize,
    seed: u64,
) -> Result<LevelStats> {
    let s = sample_level_batch::<T>(level, mode, g, seed, 0, n_samples as u64)?;
    let diffs: Vec<f64> = s.iter().map(|p| p.g_fine - p.g_coarse).collect();
    let costs: Vec<f64> = s.iter().map(|p| p.cost).collect();
    LevelStats::from_samples(&diffs, &costs)
}
