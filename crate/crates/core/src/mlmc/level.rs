//! Level decomposition of a power-law Lévy process into a remainder and an
//! annulus martingale.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coupling::{recommended_k, EmpiricalCdf};
use crate::error::{Error, Result};
use crate::levy::{radial_integral, LevyModel, LevyModelSpec, PowerLawMeasure};

/// A Lévy process with Brownian part `gauss_sd·B` and Lévy density
/// `c_neg |x|^{-α-1}` on `(-outer, -inner)`, `c_pos x^{-α-1}` on `(inner, outer)`.
///
/// Unlike [`LevyModelSpec`] the measure is not rescaled, so truncation
/// levels refer to jump sizes directly; `inner = 0` gives infinite activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlmcBase {
    pub alpha: f64,
    pub c_neg: f64,
    pub c_pos: f64,
    pub inner: f64,
    pub outer: f64,
    pub gauss_sd: f64,
}

impl MlmcBase {
    /// Skewed 1.5-stable small jumps below 1, no Brownian part.
    pub fn stable_preset() -> Self {
        Self { alpha: 1.5, c_neg: 0.4, c_pos: 0.6, inner: 0.0, outer: 1.0, gauss_sd: 0.0 }
    }

    /// The (unrescaled) measure of a truncated stable spec.
    pub fn from_spec(spec: &LevyModelSpec) -> Result<Self> {
        match *spec {
            LevyModelSpec::TruncatedStable { alpha, c_neg, c_pos, eps_lo, eps_hi } => {
                PowerLawMeasure::new(alpha, c_neg, c_pos, eps_lo, eps_hi)?;
                Ok(Self { alpha, c_neg, c_pos, inner: eps_lo, outer: eps_hi, gauss_sd: 0.0 })
            }
            _ => Err(Error::InvalidModel("multilevel base must be a truncated stable model".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha < 2.0
            && self.c_neg >= 0.0
            && self.c_pos >= 0.0
            && self.c_neg + self.c_pos > 0.0
            && self.inner >= 0.0
            && self.inner < self.outer
            && self.outer.is_finite()
            && self.gauss_sd >= 0.0
            && self.gauss_sd.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("invalid multilevel base {self:?}")))
        }
    }

    /// Jumps with magnitude in `(lo, hi)` intersected with the support.
    pub fn measure_between(&self, lo: f64, hi: f64) -> Option<PowerLawMeasure> {
        let lo = lo.max(self.inner);
        let hi = hi.min(self.outer);
        if lo > 0.0 && lo < hi {
            PowerLawMeasure::new(self.alpha, self.c_neg, self.c_pos, lo, hi).ok()
        } else {
            None
        }
    }

    /// `σ²(ε) = ∫_{|x| ≤ ε} x² Π(dx)`.
    pub fn small_jump_variance(&self, eps: f64) -> f64 {
        let hi = eps.min(self.outer);
        if hi <= self.inner {
            return 0.0;
        }
        (self.c_neg + self.c_pos) * radial_integral(self.alpha, 2.0, self.inner, hi)
    }

    /// `X_n`: jumps of size at least `eps_n` plus a Brownian motion standing
    /// in for the smaller ones.
    pub fn truncated_approximation(&self, n: u32) -> Result<LevyModel> {
        let eps = truncation(n);
        let sd = (self.gauss_sd * self.gauss_sd + self.small_jump_variance(eps)).sqrt();
        LevyModel::raw_power_law(sd, self.measure_between(eps, self.outer))
    }
}

/// `ε_n = 2^{-n}`.
pub fn truncation(n: u32) -> f64 {
    0.5f64.powi(n as i32)
}

/// Grid size `ceil(ε_n^{-p})` rounded up to a power of two.
pub fn grid_cells(n: u32, p: f64) -> usize {
    (truncation(n).powf(-p).ceil() as usize).max(1).next_power_of_two()
}

/// Parameters of the pair `(X_n, X_{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSpec {
    pub n: u32,
    pub eps_n: f64,
    /// `σ_n² - σ_{n+1}²`, the variance of the annulus martingale.
    pub sigma_prime_sq: f64,
    /// Fourth moment of the standardized annulus martingale (0 if degenerate).
    pub mu4: f64,
    pub k_prime: usize,
    /// Grid of `X_n`.
    pub m_n: usize,
    /// Grid of `X_{n+1}`, on which the pair is simulated.
    pub m_fine: usize,
    pub p: f64,
    pub degenerate: bool,
}

/// A level ready for sampling.
#[derive(Debug, Clone)]
pub struct MlmcLevel {
    pub spec: LevelSpec,
    /// Brownian part and compensated jumps of size at least `ε_n`.
    pub remainder: LevyModel,
    /// Annulus martingale divided by `σ'_n`; `None` when degenerate.
    pub annulus: Option<LevyModel>,
    /// Empirical law of the standardized annulus endpoint, for the coupler.
    pub endpoint_cache: Option<EmpiricalCdf>,
}

/// Splits `X_{n+1}` into the remainder `R'_n` and the annulus martingale
/// `M'_n` with jumps in `(ε_{n+1}, ε_n]`.
pub fn decompose_level(base: &MlmcBase, n: u32, p: f64) -> Result<MlmcLevel> {
    base.validate()?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("discretization exponent {p} must be positive")));
    }
    let eps_n = truncation(n);
    let eps_next = eps_n / 2.0;
    let m_n = grid_cells(n, p);
    let m_fine = grid_cells(n + 1, p);
    let sd = (base.gauss_sd * base.gauss_sd + base.small_jump_variance(eps_next)).sqrt();
    let remainder = LevyModel::raw_power_law(sd, base.measure_between(eps_n, base.outer))?;

    let annulus_measure = base.measure_between(eps_next, eps_n);
    let (annulus, sigma_prime_sq, mu4, k_prime) = match annulus_measure {
        Some(m) => {
            let model = LevyModelSpec::truncated_stable(m.alpha, m.c_neg, m.c_pos, m.lo, m.hi).compile()?;
            let mu4 = crate::levy::ModelMoments::of(&model).mu4;
            let k = recommended_k(mu4).map(|r| r.k).unwrap_or(1).min(m_fine);
            let var = model.pre_standardization_variance();
            (Some(model), var, mu4, k)
        }
        None => (None, 0.0, 0.0, 1),
    };
    Ok(MlmcLevel {
        spec: LevelSpec {
            n,
            eps_n,
            sigma_prime_sq,
            mu4,
            k_prime,
            m_n,
            m_fine,
            p,
            degenerate: annulus.is_none(),
        },
        remainder,
        annulus,
        endpoint_cache: None,
    })
}

impl MlmcLevel {
    /// Builds the endpoint law from `draws` samples of the standardized
    /// annulus endpoint.
    pub fn with_endpoint_cache<R: Rng + ?Sized>(mut self, draws: usize, rng: &mut R) -> Result<Self> {
        if let Some(model) = &self.annulus {
            self.endpoint_cache = Some(EmpiricalCdf::from_model(model, 1.0, draws, rng)?);
        }
        Ok(self)
    }
}
