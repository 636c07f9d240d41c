//! Coupling quality: maximal distances, endpoint errors, empirical
//! Wasserstein distances and increment-order diagnostics.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::coupling::{hierarchical_coupling, rank_vector, ComonotoneLaw, CoupledPaths, TrivariatePaths};
use crate::error::{Error, Result};
use crate::levy::{FinePath, LevyModel};
use crate::rng::{domain, stream};
use crate::scalar::{CompensatedSum, Scalar};
use crate::stats::EstimateWithError;

/// `max_j |x_j - w_j|` over the fine grid.
pub fn sup_distance<T: Scalar>(x: &FinePath<T>, w: &FinePath<T>) -> Result<f64> {
    if x.cells() != w.cells() {
        return Err(Error::LengthMismatch { left: x.cells(), right: w.cells() });
    }
    Ok(x.values()
        .iter()
        .zip(w.values())
        .map(|(a, b)| (*a - *b).abs().as_f64())
        .fold(0.0, f64::max))
}

/// Everything needed to run one coupled replication.
#[derive(Clone, Copy)]
pub struct CouplingConfig<'a> {
    /// Level sizes; a single entry is the plain reordering coupling.
    pub ks: &'a [usize],
    pub q: u32,
    pub endpoint: &'a dyn ComonotoneLaw,
}

/// Summary of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub sup: f64,
    /// `W(1) - X(1)`.
    pub endpoint_error: f64,
    pub jump_count: usize,
}

/// Regenerates replication `index` of a batch run with `seed`.
pub fn coupled_replication<T: Scalar>(
    model: &LevyModel,
    cfg: CouplingConfig<'_>,
    seed: u64,
    index: u64,
) -> Result<CoupledPaths<T>> {
    let mut rng = stream(seed, domain::REPLICATION, index);
    hierarchical_coupling(model, cfg.ks, cfg.q, cfg.endpoint, &mut rng)
}

/// Runs `n_reps` independent replications in parallel. Replication `i`
/// always uses stream `i`, so the output does not depend on thread count.
pub fn replicate<T: Scalar>(
    model: &LevyModel,
    cfg: CouplingConfig<'_>,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<Replication>> {
    (0..n_reps as u64)
        .into_par_iter()
        .map(|i| {
            let c = coupled_replication::<T>(model, cfg, seed, i)?;
            Ok(Replication {
                sup: sup_distance(&c.x, &c.w)?,
                endpoint_error: (c.w.endpoint() - c.x.endpoint()).as_f64(),
                jump_count: c.jump_count,
            })
        })
        .collect()
}

/// Mean squared maximal distance and its square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsmdEstimate {
    pub mean_square: EstimateWithError,
    /// Root of `mean_square`, standard error by the delta method.
    pub rms: EstimateWithError,
}

pub fn msmd_from_replications(reps: &[Replication]) -> Result<MsmdEstimate> {
    let sq: Vec<f64> = reps.iter().map(|r| r.sup * r.sup).collect();
    let mean_square = EstimateWithError::from_samples(&sq)?;
    Ok(MsmdEstimate { mean_square, rms: mean_square.sqrt() })
}

pub fn msmd_estimate<T: Scalar>(
    model: &LevyModel,
    cfg: CouplingConfig<'_>,
    n_reps: usize,
    seed: u64,
) -> Result<MsmdEstimate> {
    msmd_from_replications(&replicate::<T>(model, cfg, n_reps, seed)?)
}

/// Root mean square of `W(1) - X(1)`.
pub fn endpoint_rmse_from_replications(reps: &[Replication]) -> Result<EstimateWithError> {
    let sq: Vec<f64> = reps.iter().map(|r| r.endpoint_error * r.endpoint_error).collect();
    Ok(EstimateWithError::from_samples(&sq)?.sqrt())
}

pub fn endpoint_rmse<T: Scalar>(
    model: &LevyModel,
    cfg: CouplingConfig<'_>,
    n_reps: usize,
    seed: u64,
) -> Result<EstimateWithError> {
    endpoint_rmse_from_replications(&replicate::<T>(model, cfg, n_reps, seed)?)
}

/// Distance between two empirical laws of equal size: sorted matching.
pub fn wasserstein2_empirical(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let s: CompensatedSum = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).collect();
    Ok((s.value() / a.len() as f64).sqrt())
}

/// Whether the increments of `W` and `Ŵ` share their rank order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingReport {
    pub k: usize,
    /// Cells whose rank differs between the two paths.
    pub mismatches: usize,
    pub pass: bool,
}

pub fn ordering_diagnostics<T: Scalar>(t: &TrivariatePaths<T>) -> OrderingReport {
    let a = rank_vector(&t.w_increments);
    let b = rank_vector(&t.w_hat_increments);
    let mismatches = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    OrderingReport { k: a.len(), mismatches, pass: mismatches == 0 }
}

/// Monte Carlo estimate of `E Σ_i ((Z_(i) - mean Z) - (Z'_(i) - mean Z'))² / ln ln k`
/// for two independent standard normal samples of size `k`.
pub fn bridge_distance_statistic(k: usize, reps: usize, seed: u64) -> Result<EstimateWithError> {
    if k < 3 {
        return Err(Error::InvalidArgument("k must be at least 3".into()));
    }
    let norm = (k as f64).ln().ln();
    let vals: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, domain::AUXILIARY, i);
            let mut draw = || {
                let mut v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
                v.sort_by(f64::total_cmp);
                let m = v.iter().sum::<f64>() / k as f64;
                v.iter_mut().for_each(|x| *x -= m);
                v
            };
            let a = draw();
            let b = draw();
            let s: CompensatedSum = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).collect();
            s.value() / norm
        })
        .collect();
    EstimateWithError::from_samples(&vals)
}
