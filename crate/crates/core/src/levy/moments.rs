//! Moments of the standardized Lévy measure.

use super::{Component, LevyModel, LevyModelSpec};
use crate::error::Result;

/// Summary of a standardized model's Lévy measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMoments {
    /// `∫ x⁴ Π(dx)` of the standardized measure.
    pub mu4: f64,
    /// `∫ x² Π(dx)` before the final rescaling.
    pub sigma2: f64,
    /// `Π(ℝ)`; infinite for the gamma martingale.
    pub jump_rate: f64,
    components: Vec<Component>,
}

impl ModelMoments {
    pub fn of(model: &LevyModel) -> Self {
        let components = model.components().to_vec();
        ModelMoments {
            mu4: components.iter().map(|c| c.even_moment(4)).sum(),
            sigma2: model.pre_standardization_variance(),
            jump_rate: components.iter().map(Component::jump_rate).sum(),
            components,
        }
    }

    /// `Π̄(x) = Π(ℝ \ [-x, x])` of the standardized measure.
    pub fn tail(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.tail(x)).sum()
    }
}

pub fn model_moments(spec: &LevyModelSpec) -> Result<ModelMoments> {
    Ok(ModelMoments::of(&spec.compile()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::JumpLaw;

    #[test]
    fn brownian_has_no_jump_moments() {
        let m = model_moments(&LevyModelSpec::BrownianMotion).unwrap();
        assert_eq!((m.mu4, m.sigma2, m.jump_rate), (0.0, 0.0, 0.0));
        assert_eq!(m.tail(0.1), 0.0);
    }

    #[test]
    fn gamma_fourth_moment() {
        let m = model_moments(&LevyModelSpec::GammaMartingale { shape: 2.0, rate: 5.0 }).unwrap();
        assert!((m.mu4 - 3.0).abs() < 1e-12);
        assert!(m.jump_rate.is_infinite());
        assert!(m.tail(0.1) > m.tail(0.2));
    }

    #[test]
    fn cpp_moments_and_tail() {
        let spec = LevyModelSpec::CompoundPoissonDrift {
            rate: 4.0,
            jumps: JumpLaw::Uniform { lo: -1.0, hi: 1.0 },
            standardize: true,
        };
        let m = model_moments(&spec).unwrap();
        // E J^2 = 1/3, E J^4 = 1/5; mu4 = rate E J^4 / (rate E J^2)^2
        assert!((m.sigma2 - 4.0 / 3.0).abs() < 1e-14);
        assert!((m.mu4 - 0.8 / (16.0 / 9.0)).abs() < 1e-14);
        assert_eq!(m.jump_rate, 4.0);
        assert!((m.tail(0.0) - 4.0).abs() < 1e-14);
    }
}
