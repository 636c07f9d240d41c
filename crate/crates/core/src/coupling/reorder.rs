//! Brownian paths built from an independent Brownian path by permuting its
//! increments into the rank order of a Lévy path's increments.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ecdf::{endpoint_comonotone, ComonotoneLaw};
use super::permutation::{rank_permutation, Permutation};
use crate::error::{Error, Result};
use crate::levy::{cell_width, dyadic_cells, FinePath, LevyModel, LevyPath};
use crate::rng::open01;
use crate::scalar::Scalar;
use crate::special::normal_quantile_clamped;

/// Output of the reordering coupling on the fine grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPaths<T> {
    pub x: FinePath<T>,
    /// The coupled Brownian motion.
    pub w: FinePath<T>,
    /// The independent Brownian path with coupled endpoint whose segments make up `w`.
    pub w_prime: FinePath<T>,
    /// One list per hierarchy level, one permutation per parent cell.
    pub permutations: Vec<Vec<Permutation>>,
    pub endpoint_w1: f64,
    pub ks: Vec<usize>,
    /// First-level increments of `x`, summed by jump/drift/Brownian parts.
    pub x_increments: Vec<T>,
    /// `x_increments` without the common drift term; these fix the order.
    pub rank_keys: Vec<T>,
    pub w_prime_increments: Vec<T>,
    /// First-level increments of `w`: `w_prime_increments` permuted.
    pub w_increments: Vec<T>,
    /// Tie-breaking uniforms of the first level.
    pub ties: Vec<f64>,
    pub jump_count: usize,
}

/// Paths of the trivariate construction sharing `(ΔX, U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivariatePaths<T> {
    pub x: FinePath<T>,
    pub w: FinePath<T>,
    /// Brownian path with comonotone increments `ξ_i` and fresh bridges.
    pub w_hat: FinePath<T>,
    pub x_increments: Vec<T>,
    /// Drift-free increments of `x`, which fix the order.
    pub rank_keys: Vec<T>,
    pub ties: Vec<f64>,
    pub w_increments: Vec<T>,
    pub w_hat_increments: Vec<T>,
    pub endpoint_w1: f64,
}

/// Brownian motion on `cells` fine cells pinned to `end` at time 1:
/// `B(t) - t B(1) + t end`.
pub(crate) fn bridge_to<T: Scalar, R: Rng + ?Sized>(cells: usize, end: T, rng: &mut R) -> Vec<T> {
    let sd = T::lit((1.0 / cells as f64).sqrt());
    let mut b = Vec::with_capacity(cells + 1);
    b.push(T::zero());
    let mut acc = T::zero();
    for _ in 0..cells {
        let z: f64 = StandardNormal.sample(rng);
        acc += sd * T::lit(z);
        b.push(acc);
    }
    let b1 = b[cells];
    let n = cells as f64;
    for (j, v) in b.iter_mut().enumerate() {
        let t = T::lit(j as f64 / n);
        *v = (*v - t * b1) + t * end;
    }
    b
}

/// Writes into `out` the path whose cell `i` is cell `pi[i]` of `src`,
/// translated to start where cell `i - 1` ended. `out[0]` is kept.
fn assemble<T: Scalar>(src: &[T], width: usize, pi: &Permutation, out: &mut [T]) {
    for (i, &from) in pi.as_slice().iter().enumerate() {
        let base = out[i * width];
        let s0 = src[from * width];
        for s in 1..=width {
            out[i * width + s] = base + (src[from * width + s] - s0);
        }
    }
}

fn pin_tolerance<T: Scalar>(scale: f64) -> f64 {
    1e-9f64.max(T::epsilon().as_f64() * 1e3 * (1.0 + scale.abs()))
}

/// Reorders the bridge of one cell path `seg` (values at fine points of the
/// cell, both ends included) over `k` equal sub-cells so that its sub-cell
/// bridge increments follow the rank order of `(dx, ties)`. The end values
/// of `seg` are untouched.
pub(crate) fn reorder_bridge_segment<T: Scalar>(
    seg: &mut [T],
    k: usize,
    dx: &[T],
    ties: &[f64],
) -> Result<(Permutation, Vec<T>)> {
    let pw = seg.len() - 1;
    let cw = cell_width(pw, k)?;
    let a = seg[0];
    let d = seg[pw] - a;
    let frac = |s: usize| T::lit(s as f64 / pw as f64);
    let bridge: Vec<T> = (0..=pw).map(|s| (seg[s] - a) - frac(s) * d).collect();
    let sub: Vec<T> = (0..k).map(|j| bridge[(j + 1) * cw] - bridge[j * cw]).collect();
    let pi = rank_permutation(dx, ties, &sub)?;
    let mut nb = vec![T::zero(); pw + 1];
    assemble(&bridge, cw, &pi, &mut nb);
    for s in 1..pw {
        seg[s] = a + frac(s) * d + nb[s];
    }
    Ok((pi, sub))
}

struct FirstLevel<T> {
    lp: LevyPath<T>,
    dx: Vec<T>,
    keys: Vec<T>,
    w1: f64,
    ties: Vec<f64>,
    w_prime: FinePath<T>,
    dw: Vec<T>,
    pi: Permutation,
    w: Vec<T>,
}

/// Draws the endpoint uniform, the tie uniforms and the bridge normals, in
/// that order, and assembles the first reordering level around `lp`.
fn first_level<T: Scalar, R: Rng + ?Sized>(
    lp: LevyPath<T>,
    k: usize,
    endpoint: &dyn ComonotoneLaw,
    rng: &mut R,
) -> Result<FirstLevel<T>> {
    let cells = lp.path().cells();
    let width = cell_width(cells, k)?;
    let dx = lp.cell_increments(k)?;
    let keys = lp.drift_free_increments(k)?;
    let w1 = endpoint_comonotone(lp.path().endpoint().as_f64(), endpoint, open01(rng))?;
    let ties: Vec<f64> = (0..k).map(|_| open01(rng)).collect();
    let w_prime = FinePath::new(bridge_to(cells, T::lit(w1), rng))?;
    let dw = w_prime.increments(k)?;
    let pi = rank_permutation(&keys, &ties, &dw)?;
    let mut w = vec![T::zero(); cells + 1];
    assemble(w_prime.values(), width, &pi, &mut w);
    Ok(FirstLevel { lp, dx, keys, w1, ties, w_prime, dw, pi, w })
}

fn pin_endpoint<T: Scalar>(w: &mut [T], w1: f64) -> Result<()> {
    let last = w.len() - 1;
    let drift = (w[last].as_f64() - w1).abs();
    if drift.is_nan() || drift >= pin_tolerance::<T>(w1) {
        return Err(Error::NumericalGuard(format!("reordered endpoint drifted by {drift:e}")));
    }
    w[last] = T::lit(w1);
    Ok(())
}

/// Reordering coupling with `k` cells on the fine grid of mesh `2^-q`.
pub fn reorder_coupling<T: Scalar, R: Rng + ?Sized>(
    model: &LevyModel,
    k: usize,
    q: u32,
    endpoint: &dyn ComonotoneLaw,
    rng: &mut R,
) -> Result<CoupledPaths<T>> {
    hierarchical_coupling(model, &[k], q, endpoint, rng)
}

/// Reordering over nested grids: after the first level, the bridge inside
/// every level-`l` cell is reordered over `ks[l+1]` sub-cells to follow the
/// rank order of the Lévy sub-increments, with fresh tie uniforms per cell.
/// Cell endpoints set at a parent level are never changed.
///
/// Draw order: X, endpoint uniform, first-level tie uniforms, normals of
/// `W'`, then the tie uniforms of every deeper cell.
pub fn hierarchical_coupling<T: Scalar, R: Rng + ?Sized>(
    model: &LevyModel,
    ks: &[usize],
    q: u32,
    endpoint: &dyn ComonotoneLaw,
    rng: &mut R,
) -> Result<CoupledPaths<T>> {
    let cells = dyadic_cells(q)?;
    check_levels(ks, cells)?;
    let lp = model.sample_levy_path::<T, R>(cells, rng)?;
    couple_path(lp, ks, endpoint, rng)
}

fn check_levels(ks: &[usize], cells: usize) -> Result<()> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidArgument(format!("level sizes {ks:?} must be nonempty and positive")));
    }
    let total = ks
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .ok_or(Error::NotDivisible { k: usize::MAX, cells })?;
    cell_width(cells, total).map(|_| ())
}

/// Couples a Brownian path to an already sampled Lévy path.
pub fn couple_path<T: Scalar, R: Rng + ?Sized>(
    lp: LevyPath<T>,
    ks: &[usize],
    endpoint: &dyn ComonotoneLaw,
    rng: &mut R,
) -> Result<CoupledPaths<T>> {
    let cells = lp.path().cells();
    check_levels(ks, cells)?;
    let FirstLevel { lp, dx, keys, w1, ties, w_prime, dw, pi, mut w } = first_level(lp, ks[0], endpoint, rng)?;
    let w_increments = pi.apply(&dw);
    let mut permutations = vec![vec![pi]];

    let mut parent_k = ks[0];
    for &kl in &ks[1..] {
        let child_k = parent_k * kl;
        let pw = cells / parent_k;
        let dx_child = lp.drift_free_increments(child_k)?;
        let mut level = Vec::with_capacity(parent_k);
        for p in 0..parent_k {
            let sub_ties: Vec<f64> = (0..kl).map(|_| open01(rng)).collect();
            let (perm, _) =
                reorder_bridge_segment(&mut w[p * pw..=(p + 1) * pw], kl, &dx_child[p * kl..(p + 1) * kl], &sub_ties)?;
            level.push(perm);
        }
        permutations.push(level);
        parent_k = child_k;
    }

    pin_endpoint(&mut w, w1)?;
    let jump_count = lp.jump_count();
    Ok(CoupledPaths {
        x: lp.into_path(),
        w: FinePath::new(w)?,
        w_prime,
        permutations,
        endpoint_w1: w1,
        ks: ks.to_vec(),
        x_increments: dx,
        rank_keys: keys,
        w_prime_increments: dw,
        w_increments,
        ties,
        jump_count,
    })
}

/// Trivariate construction: the reordering coupling `W` and the path `Ŵ`
/// whose `k` increments are `ξ_i = Φ^{-1}(F_k(ΔX_i-) + U_i ΔF_k(ΔX_i)) / √k`,
/// joined by fresh Brownian bridges. Both use the same `ΔX_i` and `U_i`, so
/// the increments of `W` and `Ŵ` have the same rank order.
///
/// `ΔX_i` enters without the drift term, so `increment_law` must be the
/// law of `X(1/k) - drift/k`; see
/// [`EmpiricalCdf::from_model_drift_free`](crate::coupling::EmpiricalCdf::from_model_drift_free)
/// and [`exact_drift_free_law`](crate::coupling::exact_drift_free_law).
///
/// Draw order: X, endpoint uniform, tie uniforms, normals of `W'`, normals
/// of the bridges of `Ŵ`.
pub fn comonotone_increment_coupling<T: Scalar, R: Rng + ?Sized>(
    model: &LevyModel,
    k: usize,
    q: u32,
    endpoint: &dyn ComonotoneLaw,
    increment_law: &dyn ComonotoneLaw,
    rng: &mut R,
) -> Result<TrivariatePaths<T>> {
    let cells = dyadic_cells(q)?;
    let width = cell_width(cells, k)?;
    let lp = model.sample_levy_path::<T, R>(cells, rng)?;
    let FirstLevel { lp, dx, keys, w1, ties, dw, pi, mut w, .. } = first_level(lp, k, endpoint, rng)?;
    pin_endpoint(&mut w, w1)?;

    let scale = 1.0 / (k as f64).sqrt();
    let xi: Vec<T> = keys
        .iter()
        .zip(&ties)
        .map(|(d, &u)| T::lit(normal_quantile_clamped(increment_law.level(d.as_f64(), u)) * scale))
        .collect();

    let mut w_hat = vec![T::zero(); cells + 1];
    for (i, &x) in xi.iter().enumerate() {
        let start = i * width;
        let bridge = bridge_to(width, T::zero(), rng);
        // bridge_to scales its normals to unit time; rescale to the cell length.
        let shrink = T::lit(scale);
        let base = w_hat[start];
        for s in 1..=width {
            let frac = T::lit(s as f64 / width as f64);
            w_hat[start + s] = base + frac * x + shrink * bridge[s];
        }
        w_hat[start + width] = base + x;
    }

    Ok(TrivariatePaths {
        x: lp.into_path(),
        w: FinePath::new(w)?,
        w_hat: FinePath::new(w_hat)?,
        x_increments: dx,
        rank_keys: keys,
        ties,
        w_increments: pi.apply(&dw),
        w_hat_increments: xi,
        endpoint_w1: w1,
    })
}
