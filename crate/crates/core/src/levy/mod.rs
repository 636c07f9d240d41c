//! Standardized Lévy process models sampled exactly at jump level.
//!
//! A [`LevyModelSpec`] is a plain, serializable parameter set. Compiling it
//! into a [`LevyModel`] resolves the standardization constants once (scale,
//! compensating drift, Brownian variance) so the sampling hot loops only do
//! arithmetic.
//!
//! Random numbers are consumed in a fixed order per sample: for each jump
//! component the Poisson count, then the jump times, then the jump sizes;
//! afterwards grid-based gamma increments and finally the Brownian
//! increments of every fine cell.

mod measure;
mod moments;
mod path;
mod preset;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

pub use measure::{radial_integral, JumpLaw, PowerLawMeasure};
pub use moments::{model_moments, ModelMoments};
pub use path::{cell_width, dyadic_cells, increments_on_grid, FinePath, LevyPath};
pub use preset::{annulus_preset, cpp_atoms_preset, parse_preset, stable_preset, PRESET_FORMS, STABLE_ALPHA, STABLE_WEIGHTS};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default guard on the expected number of jumps per unit time.
pub const DEFAULT_MAX_EXPECTED_JUMPS: f64 = 1e8;

/// Parametric description of a Lévy process with `E X(1) = 0` and (after
/// standardization) `E X(1)^2 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LevyModelSpec {
    /// Lévy density `c_neg |x|^{-α-1}` on `(-eps_hi, -eps_lo)` and
    /// `c_pos x^{-α-1}` on `(eps_lo, eps_hi)`, compensated and rescaled.
    TruncatedStable { alpha: f64, c_neg: f64, c_pos: f64, eps_lo: f64, eps_hi: f64 },
    /// Compensated compound Poisson process, optionally rescaled to unit variance.
    CompoundPoissonDrift { rate: f64, jumps: JumpLaw, standardize: bool },
    /// Standardized gamma subordinator minus its mean.
    GammaMartingale { shape: f64, rate: f64 },
    /// `sqrt(1 - eps²) B + eps Y` with `Y` the inner model.
    PerturbedBm { eps: f64, inner: Box<LevyModelSpec> },
    BrownianMotion,
    /// Standardized martingale of the jumps of `base` with magnitude in
    /// `(eps_lo, eps_hi]`, measured in the units of the standardized base.
    SmallJumpAnnulus { base: Box<LevyModelSpec>, eps_lo: f64, eps_hi: f64 },
}

impl LevyModelSpec {
    pub fn truncated_stable(alpha: f64, c_neg: f64, c_pos: f64, eps_lo: f64, eps_hi: f64) -> Self {
        LevyModelSpec::TruncatedStable { alpha, c_neg, c_pos, eps_lo, eps_hi }
    }

    pub fn compile(&self) -> Result<LevyModel> {
        LevyModel::new(self.clone())
    }
}

/// One independent jump source of a compiled model, in standardized units.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Component {
    /// Jumps `scale · J` with `J` drawn from the power-law measure.
    PowerLaw { measure: PowerLawMeasure, scale: f64 },
    Compound { rate: f64, law: JumpLaw, scale: f64 },
    /// `scale · G(t)` for a gamma subordinator; sampled on the grid.
    Gamma { shape: f64, rate: f64, scale: f64 },
}

impl Component {
    fn rescaled(&self, factor: f64) -> Self {
        match *self {
            Component::PowerLaw { measure, scale } => Component::PowerLaw { measure, scale: scale * factor },
            Component::Compound { rate, law, scale } => Component::Compound { rate, law, scale: scale * factor },
            Component::Gamma { shape, rate, scale } => Component::Gamma { shape, rate, scale: scale * factor },
        }
    }

    /// Poisson rate of jumps; infinite for the gamma subordinator.
    pub(crate) fn jump_rate(&self) -> f64 {
        match *self {
            Component::PowerLaw { measure, .. } => measure.mass(),
            Component::Compound { rate, .. } => rate,
            Component::Gamma { .. } => f64::INFINITY,
        }
    }

    /// `∫ x Π(dx)`, compensated by the drift.
    fn first_moment(&self) -> f64 {
        match *self {
            Component::PowerLaw { measure, scale } => scale * measure.first_moment(),
            Component::Compound { rate, law, scale } => scale * rate * law.raw_moment(1),
            Component::Gamma { shape, rate, scale } => scale * shape / rate,
        }
    }

    /// `∫ x^p Π(dx)` for even p in {2, 4}.
    pub(crate) fn even_moment(&self, p: u32) -> f64 {
        match *self {
            Component::PowerLaw { measure, scale } => scale.powi(p as i32) * measure.abs_moment(f64::from(p)),
            Component::Compound { rate, law, scale } => scale.powi(p as i32) * rate * law.raw_moment(p),
            Component::Gamma { shape, rate, scale } => {
                // ∫ x^p a x^{-1} e^{-bx} dx = a Γ(p) / b^p
                let gamma_p: f64 = (1..p).map(f64::from).product();
                scale.powi(p as i32) * shape * gamma_p / rate.powi(p as i32)
            }
        }
    }

    pub(crate) fn tail(&self, x: f64) -> f64 {
        match *self {
            Component::PowerLaw { measure, scale } => measure.tail(x / scale),
            Component::Compound { rate, law, scale } => rate * law.abs_tail(x / scale),
            Component::Gamma { shape, rate, scale } => {
                if x <= 0.0 {
                    return f64::INFINITY;
                }
                // a E1(b x / scale)
                let z = rate * x / scale;
                shape * crate::quad::integrate_to_infinity(|s| (-s).exp() / s, z, 1e-13)
            }
        }
    }
}

/// A compiled model: `X(t) = drift·t + gauss_sd·B(t) + Σ components`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    spec: Option<LevyModelSpec>,
    gauss_sd: f64,
    drift: f64,
    components: Vec<Component>,
    pre_variance: f64,
    max_expected_jumps: f64,
}

fn check_finite_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be positive and finite, got {v}")))
    }
}

impl LevyModel {
    pub fn new(spec: LevyModelSpec) -> Result<Self> {
        let (gauss_sd, drift, components, pre_variance) = Self::resolve(&spec)?;
        Ok(Self {
            spec: Some(spec),
            gauss_sd,
            drift,
            components,
            pre_variance,
            max_expected_jumps: DEFAULT_MAX_EXPECTED_JUMPS,
        })
    }

    #[allow(clippy::type_complexity)]
    fn resolve(spec: &LevyModelSpec) -> Result<(f64, f64, Vec<Component>, f64)> {
        Ok(match spec {
            LevyModelSpec::BrownianMotion => (1.0, 0.0, Vec::new(), 0.0),
            &LevyModelSpec::TruncatedStable { alpha, c_neg, c_pos, eps_lo, eps_hi } => {
                let measure = PowerLawMeasure::new(alpha, c_neg, c_pos, eps_lo, eps_hi)?;
                let var = measure.abs_moment(2.0);
                let comp = Component::PowerLaw { measure, scale: 1.0 / var.sqrt() };
                (0.0, -comp.first_moment(), vec![comp], var)
            }
            &LevyModelSpec::CompoundPoissonDrift { rate, jumps, standardize } => {
                jumps.validate()?;
                if !(rate >= 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidModel(format!("jump rate {rate} must be finite and >= 0")));
                }
                let var = rate * jumps.raw_moment(2);
                if rate == 0.0 {
                    (0.0, 0.0, Vec::new(), 0.0)
                } else {
                    let scale = if standardize { 1.0 / var.sqrt() } else { 1.0 };
                    let comp = Component::Compound { rate, law: jumps, scale };
                    (0.0, -comp.first_moment(), vec![comp], var)
                }
            }
            &LevyModelSpec::GammaMartingale { shape, rate } => {
                check_finite_positive("gamma shape", shape)?;
                check_finite_positive("gamma rate", rate)?;
                let comp = Component::Gamma { shape, rate, scale: rate / shape.sqrt() };
                (0.0, -comp.first_moment(), vec![comp], shape / (rate * rate))
            }
            LevyModelSpec::PerturbedBm { eps, inner } => {
                let eps = *eps;
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(Error::InvalidModel(format!("perturbation weight {eps} outside (0, 1]")));
                }
                let (g, d, comps, _) = Self::resolve(inner)?;
                let comps: Vec<Component> = comps.iter().map(|c| c.rescaled(eps)).collect();
                let jump_var = comps.iter().map(|c| c.even_moment(2)).sum();
                let gauss = ((1.0 - eps * eps) + eps * eps * g * g).sqrt();
                (gauss, eps * d, comps, jump_var)
            }
            LevyModelSpec::SmallJumpAnnulus { base, eps_lo, eps_hi } => {
                let (lo, hi) = (*eps_lo, *eps_hi);
                if !(lo >= 0.0 && lo < hi) {
                    return Err(Error::InvalidModel(format!("annulus requires 0 <= eps_lo < eps_hi, got ({lo}, {hi})")));
                }
                let (_, _, comps, _) = Self::resolve(base)?;
                let mut restricted = Vec::new();
                for c in &comps {
                    match *c {
                        Component::PowerLaw { measure, scale } => {
                            if let Some(m) = measure.restrict(lo / scale, hi / scale) {
                                restricted.push(Component::PowerLaw { measure: m, scale });
                            }
                        }
                        _ => {
                            return Err(Error::InvalidModel(
                                "annulus restriction needs a power-law (truncated stable) base".into(),
                            ))
                        }
                    }
                }
                let var: f64 = restricted.iter().map(|c| c.even_moment(2)).sum();
                if restricted.is_empty() || var <= 0.0 {
                    return Err(Error::InvalidModel(format!("annulus ({lo}, {hi}] carries no jumps")));
                }
                let comps: Vec<Component> = restricted.iter().map(|c| c.rescaled(1.0 / var.sqrt())).collect();
                let drift = -comps.iter().map(Component::first_moment).sum::<f64>();
                (0.0, drift, comps, var)
            }
        })
    }

    /// The spec this model was compiled from; `None` for raw models.
    pub fn spec(&self) -> Option<&LevyModelSpec> {
        self.spec.as_ref()
    }

    /// Unstandardized model `gauss_sd·B(t)` plus the compensated jumps of
    /// `measure`.
    pub fn raw_power_law(gauss_sd: f64, measure: Option<PowerLawMeasure>) -> Result<Self> {
        if !(gauss_sd >= 0.0 && gauss_sd.is_finite()) {
            return Err(Error::InvalidModel(format!("Brownian scale {gauss_sd} must be finite and >= 0")));
        }
        let components: Vec<Component> =
            measure.into_iter().map(|measure| Component::PowerLaw { measure, scale: 1.0 }).collect();
        let drift = -components.iter().map(Component::first_moment).sum::<f64>();
        let pre_variance = components.iter().map(|c| c.even_moment(2)).sum();
        Ok(Self {
            spec: None,
            gauss_sd,
            drift,
            components,
            pre_variance,
            max_expected_jumps: DEFAULT_MAX_EXPECTED_JUMPS,
        })
    }

    /// Standard deviation of the Brownian part at time 1.
    pub fn gaussian_sd(&self) -> f64 {
        self.gauss_sd
    }

    /// Compensating drift per unit time.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Variance of `X(1)`: 1 for every standardized model.
    pub fn variance(&self) -> f64 {
        self.gauss_sd * self.gauss_sd + self.components.iter().map(|c| c.even_moment(2)).sum::<f64>()
    }

    /// Jump variance `∫x²Π(dx)` before the final rescaling.
    pub fn pre_standardization_variance(&self) -> f64 {
        self.pre_variance
    }

    /// Expected number of Poisson jumps per unit time (gamma parts excluded).
    pub fn expected_jumps(&self) -> f64 {
        self.components
            .iter()
            .map(Component::jump_rate)
            .filter(|r| r.is_finite())
            .sum()
    }

    /// True when `X(1/k)` can have atoms (drifted compound Poisson without
    /// a Brownian part).
    pub fn has_atoms(&self) -> bool {
        self.gauss_sd == 0.0
            && !self.components.is_empty()
            && self.components.iter().all(|c| c.jump_rate().is_finite())
    }

    pub fn with_max_expected_jumps(mut self, max: f64) -> Self {
        self.max_expected_jumps = max;
        self
    }

    /// Mixes in an independent Brownian component of the given variance and
    /// shrinks the rest so the total variance is unchanged. Small values
    /// break numerical ties among compound Poisson increments.
    pub fn with_negligible_brownian(mut self, variance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&variance) {
            return Err(Error::InvalidModel(format!("noise variance {variance} outside [0, 1)")));
        }
        let shrink = (1.0 - variance).sqrt();
        self.components = self.components.iter().map(|c| c.rescaled(shrink)).collect();
        self.drift *= shrink;
        self.gauss_sd = (self.gauss_sd * self.gauss_sd * (1.0 - variance) + variance).sqrt();
        Ok(self)
    }

    pub(crate) fn components(&self) -> &[Component] {
        &self.components
    }

    /// Power-law jump parts `(measure, scale)` when every component is one.
    pub fn power_law_parts(&self) -> Option<Vec<(PowerLawMeasure, f64)>> {
        self.components
            .iter()
            .map(|c| match *c {
                Component::PowerLaw { measure, scale } => Some((measure, scale)),
                _ => None,
            })
            .collect()
    }

    fn check_budget(&self, horizon: f64) -> Result<()> {
        let expected = self.expected_jumps() * horizon;
        if expected > self.max_expected_jumps {
            return Err(Error::JumpBudgetExceeded { expected, max: self.max_expected_jumps });
        }
        Ok(())
    }

    /// Samples the path exactly at the `cells + 1` grid points of `[0, 1]`.
    pub fn sample_levy_path<T: Scalar, R: Rng + ?Sized>(&self, cells: usize, rng: &mut R) -> Result<LevyPath<T>> {
        if cells == 0 {
            return Err(Error::InvalidArgument("grid needs at least one cell".into()));
        }
        self.check_budget(1.0)?;
        let n = cells as f64;
        let dt = 1.0 / n;

        let mut jumps: Vec<(f64, f64)> = Vec::new();
        let mut gamma_parts: Vec<f64> = Vec::new();
        for comp in &self.components {
            match *comp {
                Component::PowerLaw { measure, scale } => {
                    let count = poisson_count(measure.mass(), rng);
                    let start = jumps.len();
                    for _ in 0..count {
                        jumps.push((rng.random::<f64>(), 0.0));
                    }
                    for j in &mut jumps[start..] {
                        j.1 = scale * measure.sample_jump(rng);
                    }
                }
                Component::Compound { rate, law, scale } => {
                    let count = poisson_count(rate, rng);
                    let start = jumps.len();
                    for _ in 0..count {
                        jumps.push((rng.random::<f64>(), 0.0));
                    }
                    for j in &mut jumps[start..] {
                        j.1 = scale * law.sample(rng);
                    }
                }
                Component::Gamma { shape, rate, scale } => {
                    let g = Gamma::new(shape * dt, 1.0 / rate)
                        .map_err(|e| Error::InvalidModel(format!("gamma increments: {e}")))?;
                    if gamma_parts.is_empty() {
                        gamma_parts = vec![0.0; cells];
                    }
                    for part in gamma_parts.iter_mut() {
                        *part += scale * g.sample(rng);
                    }
                }
            }
        }
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let jump_count = jumps.len();

        let gauss_parts: Vec<T> = if self.gauss_sd > 0.0 {
            let sd = self.gauss_sd * dt.sqrt();
            (0..cells)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    T::lit(sd * z)
                })
                .collect()
        } else {
            Vec::new()
        };

        let has_jump_parts = jump_count > 0 || !gamma_parts.is_empty();
        let mut jump_parts: Vec<T> = if has_jump_parts {
            gamma_parts.iter().map(|&g| T::lit(g)).collect()
        } else {
            Vec::new()
        };
        if has_jump_parts && jump_parts.is_empty() {
            jump_parts = vec![T::zero(); cells];
        }

        let mut values = Vec::with_capacity(cells + 1);
        values.push(T::zero());
        let mut jump_acc = T::zero();
        let mut gamma_acc = T::zero();
        let mut gauss_acc = T::zero();
        let mut next = 0usize;
        for j in 1..=cells {
            let t = j as f64 / n;
            // Jumps with time in ((j-1)/n, j/n] belong to cell j-1.
            let mut cell_sum = T::zero();
            while next < jumps.len() && jumps[next].0 * n <= j as f64 {
                let size = T::lit(jumps[next].1);
                jump_acc += size;
                cell_sum += size;
                next += 1;
            }
            if has_jump_parts {
                if !gamma_parts.is_empty() {
                    gamma_acc += jump_parts[j - 1];
                    jump_parts[j - 1] += cell_sum;
                } else {
                    jump_parts[j - 1] = cell_sum;
                }
            }
            if !gauss_parts.is_empty() {
                gauss_acc += gauss_parts[j - 1];
            }
            values.push(T::lit(self.drift * t) + jump_acc + gamma_acc + gauss_acc);
        }
        let path = FinePath::new(values)?;
        Ok(LevyPath { path, drift: self.drift, jump_parts, gauss_parts, jump_count })
    }

    /// One exact draw of `X(dt)`, formed like [`LevyPath::cell_increments`].
    pub fn sample_increment<T: Scalar, R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<T> {
        let (jumps, gauss) = self.increment_parts::<T, R>(dt, rng)?;
        Ok(T::lit(self.drift * dt) + jumps + gauss)
    }

    /// One exact draw of `X(dt) - drift·dt`, formed like
    /// [`LevyPath::drift_free_increments`].
    pub fn sample_drift_free_increment<T: Scalar, R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<T> {
        let (jumps, gauss) = self.increment_parts::<T, R>(dt, rng)?;
        Ok(jumps + gauss)
    }

    fn increment_parts<T: Scalar, R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<(T, T)> {
        self.check_budget(dt)?;
        let mut jumps = T::zero();
        for comp in &self.components {
            match *comp {
                Component::PowerLaw { measure, scale } => {
                    for _ in 0..poisson_count(measure.mass() * dt, rng) {
                        jumps += T::lit(scale * measure.sample_jump(rng));
                    }
                }
                Component::Compound { rate, law, scale } => {
                    for _ in 0..poisson_count(rate * dt, rng) {
                        jumps += T::lit(scale * law.sample(rng));
                    }
                }
                Component::Gamma { shape, rate, scale } => {
                    let g = Gamma::new(shape * dt, 1.0 / rate)
                        .map_err(|e| Error::InvalidModel(format!("gamma increment: {e}")))?;
                    jumps += T::lit(scale * g.sample(rng));
                }
            }
        }
        let gauss = if self.gauss_sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            T::lit(self.gauss_sd * dt.sqrt() * z)
        } else {
            T::zero()
        };
        Ok((jumps, gauss))
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let p = Poisson::new(mean).expect("finite positive Poisson mean");
    let c: f64 = p.sample(rng);
    c as usize
}

/// Samples the model on the dyadic grid of mesh `2^-q`.
pub fn sample_fine_path<T: Scalar, R: Rng + ?Sized>(model: &LevyModel, q: u32, rng: &mut R) -> Result<FinePath<T>> {
    let cells = dyadic_cells(q)?;
    Ok(model.sample_levy_path::<T, R>(cells, rng)?.into_path())
}

/// One exact draw of `X(1)`.
pub fn sample_endpoint<T: Scalar, R: Rng + ?Sized>(model: &LevyModel, rng: &mut R) -> Result<T> {
    model.sample_increment(1.0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::SeedableRng;

    fn stable() -> LevyModel {
        LevyModelSpec::truncated_stable(1.5, 0.4, 0.6, 0.03, 0.1).compile().unwrap()
    }

    #[test]
    fn brownian_q1_uses_two_scaled_normals() {
        let model = LevyModelSpec::BrownianMotion.compile().unwrap();
        let mut rng = stream(11, 0, 0);
        let path: FinePath<f64> = sample_fine_path(&model, 1, &mut rng).unwrap();
        let mut rng = stream(11, 0, 0);
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let s = 0.5f64.sqrt();
        assert_eq!(path.values(), &[0.0, s * z1, s * z1 + s * z2]);
    }

    #[test]
    fn zero_rate_cpp_is_identically_zero() {
        let spec = LevyModelSpec::CompoundPoissonDrift {
            rate: 0.0,
            jumps: JumpLaw::Exponential { rate: 1.0 },
            standardize: true,
        };
        let model = spec.compile().unwrap();
        let mut rng = stream(1, 0, 0);
        let path: FinePath<f64> = sample_fine_path(&model, 6, &mut rng).unwrap();
        assert!(path.values().iter().all(|&v| v == 0.0));
        assert_eq!(sample_endpoint::<f64, _>(&model, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn rejects_low_resolution_and_jump_overflow() {
        let model = stable();
        let mut rng = stream(1, 0, 0);
        assert_eq!(sample_fine_path::<f64, _>(&model, 0, &mut rng), Err(Error::InvalidResolution(0)));
        let guarded = model.with_max_expected_jumps(10.0);
        assert!(matches!(
            sample_fine_path::<f64, _>(&guarded, 4, &mut rng),
            Err(Error::JumpBudgetExceeded { .. })
        ));
    }

    #[test]
    fn standardized_variance_is_one() {
        let specs = [
            LevyModelSpec::truncated_stable(1.5, 0.4, 0.6, 0.03, 0.1),
            LevyModelSpec::GammaMartingale { shape: 2.0, rate: 3.0 },
            LevyModelSpec::CompoundPoissonDrift {
                rate: 5.0,
                jumps: JumpLaw::TwoPoint { lo: -1.0, hi: 2.0, p_hi: 0.7 },
                standardize: true,
            },
            LevyModelSpec::PerturbedBm { eps: 0.3, inner: Box::new(LevyModelSpec::truncated_stable(1.5, 0.4, 0.6, 0.03, 0.1)) },
            LevyModelSpec::BrownianMotion,
        ];
        for s in specs {
            let m = s.compile().unwrap();
            assert!((m.variance() - 1.0).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn coarse_values_do_not_depend_on_resolution_for_jump_models() {
        let spec = LevyModelSpec::CompoundPoissonDrift {
            rate: 30.0,
            jumps: JumpLaw::Normal { mean: 0.2, sd: 1.0 },
            standardize: true,
        };
        let model = spec.compile().unwrap();
        let coarse: FinePath<f64> = sample_fine_path(&model, 4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5)).unwrap();
        let fine: FinePath<f64> = sample_fine_path(&model, 9, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(coarse.values(), fine.skeleton(16).unwrap().as_slice());
    }

    #[test]
    fn path_is_piecewise_linear_between_jumps() {
        let spec = LevyModelSpec::CompoundPoissonDrift {
            rate: 3.0,
            jumps: JumpLaw::Exponential { rate: 1.0 },
            standardize: true,
        };
        let model = spec.compile().unwrap();
        let mut rng = stream(2, 0, 0);
        let lp: LevyPath<f64> = model.sample_levy_path(1024, &mut rng).unwrap();
        let incs = lp.path().increments(1024).unwrap();
        let drift_step = model.drift() / 1024.0;
        let jumpy = incs.iter().filter(|d| (*d - drift_step).abs() > 1e-12).count();
        assert_eq!(jumpy, lp.jump_count());
    }

    #[test]
    fn structural_increments_agree_with_differences() {
        let model = stable().with_negligible_brownian(1e-12).unwrap();
        let mut rng = stream(9, 0, 0);
        let lp: LevyPath<f64> = model.sample_levy_path(4096, &mut rng).unwrap();
        let a = lp.cell_increments(128).unwrap();
        let b = lp.path().increments(128).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn no_jump_cells_are_exact_ties_and_match_increment_draws() {
        let spec = LevyModelSpec::CompoundPoissonDrift {
            rate: 20.0,
            jumps: JumpLaw::TwoPoint { lo: -1.0, hi: 2.0, p_hi: 0.7 },
            standardize: true,
        };
        let model = spec.compile().unwrap();
        let k = 64;
        let lp: LevyPath<f64> = model.sample_levy_path(4096, &mut stream(4, 0, 0)).unwrap();
        let incs = lp.cell_increments(k).unwrap();
        let mut draws = Vec::new();
        let mut rng = stream(4, 1, 0);
        for _ in 0..2000 {
            draws.push(model.sample_increment::<f64, _>(1.0 / k as f64, &mut rng).unwrap());
        }
        let atom = model.drift() * (1.0 / k as f64);
        let path_atoms = incs.iter().filter(|&&d| d == atom).count();
        let draw_atoms = draws.iter().filter(|&&d| d == atom).count();
        assert!(path_atoms > 10, "{path_atoms}");
        assert!(draw_atoms > 500, "{draw_atoms}");
    }

    #[test]
    fn annulus_of_stable_base_is_a_restricted_stable() {
        let base = LevyModelSpec::truncated_stable(1.5, 0.4, 0.6, 1e-6, 1.0);
        let base_model = base.compile().unwrap();
        let scale = base_model.power_law_parts().unwrap()[0].1;
        let ann = LevyModelSpec::SmallJumpAnnulus { base: Box::new(base), eps_lo: 0.0625, eps_hi: 0.125 }
            .compile()
            .unwrap();
        let direct = LevyModelSpec::truncated_stable(1.5, 0.4, 0.6, 0.0625 / scale, 0.125 / scale)
            .compile()
            .unwrap();
        assert!((ann.variance() - 1.0).abs() < 1e-12);
        let (m1, s1) = ann.power_law_parts().unwrap()[0];
        let (m2, s2) = direct.power_law_parts().unwrap()[0];
        assert!((m1.lo - m2.lo).abs() < 1e-15 && (m1.hi - m2.hi).abs() < 1e-15);
        assert!((s1 - s2).abs() < 1e-12 * s2);
        assert!((ann.drift() - direct.drift()).abs() < 1e-12 * direct.drift().abs());
    }

    #[test]
    fn f32_paths_are_supported() {
        let model = stable();
        let mut rng = stream(3, 0, 0);
        let p: FinePath<f32> = sample_fine_path(&model, 8, &mut rng).unwrap();
        assert_eq!(p.cells(), 256);
        assert!(p.values().iter().all(|v| v.is_finite()));
    }
}
