//! Named model presets used by the command line and the experiments.

use super::{JumpLaw, LevyModelSpec};
use crate::error::{Error, Result};

/// Negative- and positive-side weights of the skewed 1.5-stable family.
pub const STABLE_WEIGHTS: (f64, f64) = (0.4, 0.6);
pub const STABLE_ALPHA: f64 = 1.5;

/// Accepted preset forms, for help texts.
pub const PRESET_FORMS: &[&str] = &[
    "exp-stable(eps_hi,eps_lo)",
    "annulus(n)",
    "perturbed(eps)",
    "gamma",
    "gamma(shape,rate)",
    "fig1-gamma",
    "fig1-gamma(shape,rate)",
    "cpp-atoms",
    "brownian",
];

/// Truncated skewed 1.5-stable measure on `eps_lo < |x| < eps_hi`.
pub fn stable_preset(eps_hi: f64, eps_lo: f64) -> LevyModelSpec {
    let (c_neg, c_pos) = STABLE_WEIGHTS;
    LevyModelSpec::truncated_stable(STABLE_ALPHA, c_neg, c_pos, eps_lo, eps_hi)
}

/// Jumps in `(2^{-n-1}, 2^{-n})`, rescaled to unit variance.
pub fn annulus_preset(n: u32) -> LevyModelSpec {
    let hi = 0.5f64.powi(n as i32);
    stable_preset(hi, hi / 2.0)
}

/// Drifted compound Poisson process whose small-time increments have an atom.
pub fn cpp_atoms_preset() -> LevyModelSpec {
    LevyModelSpec::CompoundPoissonDrift {
        rate: 20.0,
        jumps: JumpLaw::TwoPoint { lo: -1.0, hi: 2.0, p_hi: 0.5 },
        standardize: true,
    }
}

fn args(name: &str, inner: &str, want: &[usize]) -> Result<Vec<f64>> {
    let vals: Vec<f64> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownPreset(format!("{name}: bad number '{}'", s.trim())))
            })
            .collect::<Result<_>>()?
    };
    if want.contains(&vals.len()) {
        Ok(vals)
    } else {
        Err(Error::UnknownPreset(format!("{name}: expected {want:?} arguments, got {}", vals.len())))
    }
}

/// Parses a preset name such as `exp-stable(0.1,0.03)` into a model spec.
pub fn parse_preset(text: &str) -> Result<LevyModelSpec> {
    let text = text.trim();
    let (name, inner) = match text.find('(') {
        Some(open) => {
            let inner = text[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownPreset(text.to_string()))?;
            (&text[..open], inner)
        }
        None => (text, ""),
    };
    let spec = match name {
        "exp-stable" => {
            let a = args(name, inner, &[2])?;
            stable_preset(a[0], a[1])
        }
        "annulus" => {
            let a = args(name, inner, &[1])?;
            if a[0] < 0.0 || a[0].fract() != 0.0 || a[0] > 60.0 {
                return Err(Error::UnknownPreset(format!("annulus: level {} must be an integer in 0..=60", a[0])));
            }
            annulus_preset(a[0] as u32)
        }
        "perturbed" => {
            let a = args(name, inner, &[1])?;
            LevyModelSpec::PerturbedBm { eps: a[0], inner: Box::new(stable_preset(0.1, 0.03)) }
        }
        "gamma" | "fig1-gamma" => {
            let a = args(name, inner, &[0, 2])?;
            let (shape, rate) = if a.is_empty() { (1.0, 1.0) } else { (a[0], a[1]) };
            LevyModelSpec::GammaMartingale { shape, rate }
        }
        "cpp-atoms" => {
            args(name, inner, &[0])?;
            cpp_atoms_preset()
        }
        "brownian" => {
            args(name, inner, &[0])?;
            LevyModelSpec::BrownianMotion
        }
        _ => return Err(Error::UnknownPreset(text.to_string())),
    };
    // Surface parameter errors at parse time.
    spec.compile().map_err(|e| Error::UnknownPreset(format!("{text}: {e}")))?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_preset("exp-stable(0.1, 0.03)").unwrap(), stable_preset(0.1, 0.03));
        assert_eq!(parse_preset("annulus(3)").unwrap(), stable_preset(0.125, 0.0625));
        assert!(matches!(parse_preset("perturbed(0.5)").unwrap(), LevyModelSpec::PerturbedBm { .. }));
        assert_eq!(
            parse_preset("fig1-gamma").unwrap(),
            LevyModelSpec::GammaMartingale { shape: 1.0, rate: 1.0 }
        );
        assert_eq!(parse_preset("gamma(2,3)").unwrap(), parse_preset("fig1-gamma(2,3)").unwrap());
        assert_eq!(parse_preset("brownian").unwrap(), LevyModelSpec::BrownianMotion);
        assert!(parse_preset("cpp-atoms").unwrap().compile().unwrap().has_atoms());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        for bad in ["nope", "exp-stable(0.1)", "exp-stable(0.03,0.1)", "annulus(1.5)", "perturbed(2)", "exp-stable(0.1,0.03"] {
            assert!(matches!(parse_preset(bad), Err(Error::UnknownPreset(_))), "{bad}");
        }
    }
}
