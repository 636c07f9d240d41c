//! Distribution functions fed to the comonotone map `x ↦ Φ^{-1}(F(x-) + u·ΔF(x))`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::levy::{LevyModel, LevyModelSpec};
use crate::special::{gamma_cdf, normal_cdf, normal_quantile_clamped};

/// A law on the real line seen through its left limit and atoms.
pub trait ComonotoneLaw: Send + Sync {
    /// `P(Y < x)`.
    fn cdf_left(&self, x: f64) -> f64;

    /// `P(Y = x)`.
    fn atom(&self, _x: f64) -> f64 {
        0.0
    }

    /// Randomized distribution function `P(Y < x) + u P(Y = x)`, uniform on
    /// `(0, 1)` when `x` is drawn from the law and `u` is an independent uniform.
    fn level(&self, x: f64, u: f64) -> f64 {
        self.cdf_left(x) + u * self.atom(x)
    }
}

/// Empirical distribution of a fixed sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN in empirical sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    /// `n` independent draws of `X(dt)`.
    pub fn from_model<R: Rng + ?Sized>(model: &LevyModel, dt: f64, n: usize, rng: &mut R) -> Result<Self> {
        let draws = (0..n)
            .map(|_| model.sample_increment::<f64, R>(dt, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(draws)
    }

    /// `n` independent draws of `X(dt) - drift·dt`, the law used to rank
    /// increments in [`comonotone_increment_coupling`](crate::coupling::comonotone_increment_coupling).
    pub fn from_model_drift_free<R: Rng + ?Sized>(model: &LevyModel, dt: f64, n: usize, rng: &mut R) -> Result<Self> {
        let draws = (0..n)
            .map(|_| model.sample_drift_free_increment::<f64, R>(dt, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(draws)
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    fn count_below(&self, x: f64) -> usize {
        self.sorted.partition_point(|&s| s < x)
    }

    fn count_at_most(&self, x: f64) -> usize {
        self.sorted.partition_point(|&s| s <= x)
    }

    /// Smallest sample whose rank is at least `ceil(u n)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.sorted.len();
        let rank = ((u * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[rank - 1]
    }
}

impl ComonotoneLaw for EmpiricalCdf {
    fn cdf_left(&self, x: f64) -> f64 {
        self.count_below(x) as f64 / self.sorted.len() as f64
    }

    fn atom(&self, x: f64) -> f64 {
        (self.count_at_most(x) - self.count_below(x)) as f64 / self.sorted.len() as f64
    }
}

/// Strictly increasing smoothing of an empirical distribution.
///
/// Each distinct sample value `v` owns the level interval
/// `[(f + 1/2)/(n+1), (f + c - 1/2)/(n+1)]` where `f` counts the samples below
/// `v` and `c` those equal to it; the function is linear between consecutive
/// values and has exponential tails outside the sample range. Unlike the
/// raw empirical CDF it never maps two distinct inputs to the same level.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedCdf {
    values: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    scale: f64,
}

impl SmoothedCdf {
    pub fn new(ecdf: &EmpiricalCdf) -> Self {
        let s = ecdf.sorted_samples();
        let denom = (s.len() + 1) as f64;
        let (mut values, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
        let mut f = 0usize;
        while f < s.len() {
            let v = s[f];
            let c = s[f..].partition_point(|&x| x == v);
            values.push(v);
            lo.push((f as f64 + 0.5) / denom);
            hi.push((f as f64 + c as f64 - 0.5) / denom);
            f += c;
        }
        let range = values[values.len() - 1] - values[0];
        let scale = if range > 0.0 { range } else { values[0].abs().max(1.0) };
        Self { values, lo, hi, scale }
    }

    fn locate(&self, x: f64) -> std::result::Result<usize, usize> {
        self.values.binary_search_by(|v| v.total_cmp(&x))
    }
}

impl ComonotoneLaw for SmoothedCdf {
    fn cdf_left(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        match self.locate(x) {
            Ok(j) => self.lo[j],
            Err(0) => self.lo[0] * ((x - self.values[0]) / self.scale).exp(),
            Err(j) if j > last => 1.0 - (1.0 - self.hi[last]) * (-(x - self.values[last]) / self.scale).exp(),
            Err(j) => {
                let (a, b) = (self.values[j - 1], self.values[j]);
                let w = (x - a) / (b - a);
                self.hi[j - 1] + w * (self.lo[j] - self.hi[j - 1])
            }
        }
    }

    fn atom(&self, x: f64) -> f64 {
        match self.locate(x) {
            Ok(j) => self.hi[j] - self.lo[j],
            Err(_) => 0.0,
        }
    }
}

/// Centered normal law with the given standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLaw {
    pub sd: f64,
}

impl ComonotoneLaw for NormalLaw {
    fn cdf_left(&self, x: f64) -> f64 {
        normal_cdf(x / self.sd)
    }
}

/// Law of `scale·G + shift` with `G ~ Gamma(shape, rate)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    pub shape: f64,
    pub rate: f64,
    pub scale: f64,
    pub shift: f64,
}

impl ComonotoneLaw for GammaLaw {
    fn cdf_left(&self, x: f64) -> f64 {
        gamma_cdf((x - self.shift) / self.scale, self.shape, self.rate)
    }
}

/// Exact law of `X(t)` for models where it has a closed form
/// (Brownian motion and the standardized gamma martingale).
pub fn exact_law(spec: &LevyModelSpec, t: f64) -> Option<Box<dyn ComonotoneLaw>> {
    match *spec {
        LevyModelSpec::BrownianMotion => Some(Box::new(NormalLaw { sd: t.sqrt() })),
        LevyModelSpec::GammaMartingale { shape, rate } => Some(Box::new(GammaLaw {
            shape: shape * t,
            rate,
            scale: rate / shape.sqrt(),
            shift: -shape.sqrt() * t,
        })),
        _ => None,
    }
}

/// Exact law of `X(t) - drift·t` where [`exact_law`] applies.
pub fn exact_drift_free_law(spec: &LevyModelSpec, t: f64) -> Option<Box<dyn ComonotoneLaw>> {
    match *spec {
        LevyModelSpec::BrownianMotion => Some(Box::new(NormalLaw { sd: t.sqrt() })),
        LevyModelSpec::GammaMartingale { shape, rate } => {
            Some(Box::new(GammaLaw { shape: shape * t, rate, scale: rate / shape.sqrt(), shift: 0.0 }))
        }
        _ => None,
    }
}

/// Comonotone image of `x1` in the standard normal law:
/// `Φ^{-1}(F(x1-) + u ΔF(x1))`, with the level clamped away from 0 and 1.
pub fn endpoint_comonotone(x1: f64, law: &dyn ComonotoneLaw, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidProbability(u));
    }
    Ok(normal_quantile_clamped(law.level(x1, u)))
}
