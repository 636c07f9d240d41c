//! Finite Lévy measures with exact inverse-transform jump samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::open01;
use crate::special::normal_quantile;

/// Two-sided truncated power law
/// `c_neg |x|^{-α-1}` on `(-hi, -lo)` plus `c_pos x^{-α-1}` on `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawMeasure {
    pub alpha: f64,
    pub c_neg: f64,
    pub c_pos: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PowerLawMeasure {
    pub fn new(alpha: f64, c_neg: f64, c_pos: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidModel(format!("alpha {alpha} outside (0, 2)")));
        }
        if !(c_neg >= 0.0 && c_pos >= 0.0 && c_neg + c_pos > 0.0) {
            return Err(Error::InvalidModel(format!(
                "weights ({c_neg}, {c_pos}) must be nonnegative with one positive"
            )));
        }
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "truncation requires 0 < eps_lo < eps_hi < inf, got ({lo}, {hi})"
            )));
        }
        Ok(Self { alpha, c_neg, c_pos, lo, hi })
    }

    /// `∫_lo^hi x^{p-α-1} dx`.
    fn radial(&self, p: f64) -> f64 {
        radial_integral(self.alpha, p, self.lo, self.hi)
    }

    /// Total mass `Π(ℝ)`, the jump rate.
    pub fn mass(&self) -> f64 {
        (self.c_neg + self.c_pos) * (self.lo.powf(-self.alpha) - self.hi.powf(-self.alpha)) / self.alpha
    }

    /// Absolute moment `∫ |x|^p Π(dx)`.
    pub fn abs_moment(&self, p: f64) -> f64 {
        (self.c_neg + self.c_pos) * self.radial(p)
    }

    /// Signed first moment `∫ x Π(dx)`.
    pub fn first_moment(&self) -> f64 {
        (self.c_pos - self.c_neg) * self.radial(1.0)
    }

    /// Tail `Π(ℝ \ [-x, x])`.
    pub fn tail(&self, x: f64) -> f64 {
        let x = x.abs();
        if x < self.lo {
            self.mass()
        } else if x >= self.hi {
            0.0
        } else {
            (self.c_neg + self.c_pos) * (x.powf(-self.alpha) - self.hi.powf(-self.alpha)) / self.alpha
        }
    }

    /// Restriction to magnitudes in `(lo, hi]`; `None` when empty.
    pub fn restrict(&self, lo: f64, hi: f64) -> Option<Self> {
        let new_lo = self.lo.max(lo);
        let new_hi = self.hi.min(hi);
        (new_lo < new_hi).then_some(Self { lo: new_lo, hi: new_hi, ..*self })
    }

    /// Probability that a jump is positive.
    pub fn positive_fraction(&self) -> f64 {
        // Both sides share the radial mass, so the side masses cancel.
        self.c_pos / (self.c_pos + self.c_neg)
    }

    /// Inverse of the truncated Pareto distribution function of |jump|.
    pub fn magnitude_quantile(&self, u: f64) -> f64 {
        let a = self.lo.powf(-self.alpha);
        let b = self.hi.powf(-self.alpha);
        (a - u * (a - b)).powf(-1.0 / self.alpha).clamp(self.lo, self.hi)
    }

    /// One jump: side by Bernoulli draw, magnitude by inverse transform.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let side = open01(rng);
        let u = open01(rng);
        let m = self.magnitude_quantile(u);
        if side < self.positive_fraction() {
            m
        } else {
            -m
        }
    }
}

/// `∫_lo^hi x^{p-α-1} dx` in closed form.
pub fn radial_integral(alpha: f64, p: f64, lo: f64, hi: f64) -> f64 {
    let e = p - alpha;
    if e.abs() < 1e-12 {
        (hi / lo).ln()
    } else {
        (hi.powf(e) - lo.powf(e)) / e
    }
}

/// Jump-size laws for compound Poisson models, each with an exact quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum JumpLaw {
    Exponential { rate: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `lo` with probability `1 - p_hi`, `hi` with probability `p_hi`.
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpLaw::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            JumpLaw::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            JumpLaw::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            JumpLaw::TwoPoint { lo, hi, p_hi } => {
                lo.is_finite() && hi.is_finite() && lo < hi && (0.0..=1.0).contains(&p_hi)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("invalid jump law {self:?}")))
        }
    }

    /// Left-inverse distribution function.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            JumpLaw::Exponential { rate } => -(-u).ln_1p() / rate,
            JumpLaw::Normal { mean, sd } => mean + sd * normal_quantile(u),
            JumpLaw::Uniform { lo, hi } => lo + u * (hi - lo),
            JumpLaw::TwoPoint { lo, hi, p_hi } => {
                if u <= 1.0 - p_hi {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(open01(rng))
    }

    /// Raw moment `E J^p` for p in {1, 2, 4}.
    pub fn raw_moment(&self, p: u32) -> f64 {
        match *self {
            JumpLaw::Exponential { rate } => {
                let fact: f64 = (1..=p).map(f64::from).product();
                fact / rate.powi(p as i32)
            }
            JumpLaw::Normal { mean: m, sd: s } => match p {
                1 => m,
                2 => m * m + s * s,
                4 => m.powi(4) + 6.0 * m * m * s * s + 3.0 * s.powi(4),
                _ => unimplemented!("moment order {p}"),
            },
            JumpLaw::Uniform { lo, hi } => {
                let q = p as i32 + 1;
                (hi.powi(q) - lo.powi(q)) / (f64::from(q) * (hi - lo))
            }
            JumpLaw::TwoPoint { lo, hi, p_hi } => {
                (1.0 - p_hi) * lo.powi(p as i32) + p_hi * hi.powi(p as i32)
            }
        }
    }

    /// `P(|J| > x)`.
    pub fn abs_tail(&self, x: f64) -> f64 {
        let x = x.abs();
        match *self {
            JumpLaw::Exponential { rate } => (-rate * x).exp(),
            JumpLaw::Normal { mean, sd } => {
                use crate::special::normal_cdf;
                normal_cdf((-x - mean) / sd) + normal_cdf((mean - x) / sd)
            }
            JumpLaw::Uniform { lo, hi } => {
                let len = hi - lo;
                let below = ((-x).min(hi) - lo).max(0.0);
                let above = (hi - x.max(lo)).max(0.0);
                (below + above) / len
            }
            JumpLaw::TwoPoint { lo, hi, p_hi } => {
                let mut t = 0.0;
                if lo.abs() > x {
                    t += 1.0 - p_hi;
                }
                if hi.abs() > x {
                    t += p_hi;
                }
                t
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn preset() -> PowerLawMeasure {
        PowerLawMeasure::new(1.5, 0.4, 0.6, 0.03, 0.1).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PowerLawMeasure::new(2.0, 0.4, 0.6, 0.03, 0.1).is_err());
        assert!(PowerLawMeasure::new(1.5, 0.0, 0.0, 0.03, 0.1).is_err());
        assert!(PowerLawMeasure::new(1.5, 0.4, 0.6, 0.1, 0.03).is_err());
        assert!(PowerLawMeasure::new(1.5, -0.1, 0.6, 0.03, 0.1).is_err());
    }

    #[test]
    fn quantile_hits_truncation_bounds() {
        let m = preset();
        assert!((m.magnitude_quantile(0.0) - 0.03).abs() < 1e-15);
        assert!((m.magnitude_quantile(1.0) - 0.1).abs() < 1e-15);
        // Median of the magnitude law agrees with the tail function.
        let med = m.magnitude_quantile(0.5);
        assert!((m.tail(med) / m.mass() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tail_is_nonincreasing() {
        let m = preset();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let t = m.tail(i as f64 * 0.001);
            assert!(t <= prev);
            prev = t;
        }
        assert_eq!(m.tail(0.2), 0.0);
    }

    #[test]
    fn empirical_side_fraction() {
        let m = preset();
        let mut rng = stream(3, 0, 0);
        let n = 40_000;
        let pos = (0..n).filter(|_| m.sample_jump(&mut rng) > 0.0).count();
        let frac = pos as f64 / n as f64;
        assert!((frac - 0.6).abs() < 4.0 * (0.24f64 / n as f64).sqrt());
    }

    #[test]
    fn jump_law_moments_match_quantile_integrals() {
        let laws = [
            JumpLaw::Exponential { rate: 2.0 },
            JumpLaw::Uniform { lo: -1.0, hi: 3.0 },
            JumpLaw::TwoPoint { lo: -1.0, hi: 2.0, p_hi: 0.7 },
            JumpLaw::Normal { mean: 0.5, sd: 1.5 },
        ];
        for law in laws {
            for p in [1u32, 2, 4] {
                // Midpoint rule on the quantile function.
                let n = 200_000;
                let est: f64 = (0..n)
                    .map(|i| law.quantile((i as f64 + 0.5) / n as f64).powi(p as i32))
                    .sum::<f64>()
                    / n as f64;
                let exact = law.raw_moment(p);
                assert!((est - exact).abs() < 2e-2 * exact.abs().max(1.0), "{law:?} p={p}: {est} vs {exact}");
            }
        }
    }

    #[test]
    fn two_point_quantile_is_left_inverse() {
        let law = JumpLaw::TwoPoint { lo: -1.0, hi: 2.0, p_hi: 0.7 };
        assert_eq!(law.quantile(0.3), -1.0);
        assert_eq!(law.quantile(0.300_001), 2.0);
        assert!((law.abs_tail(1.5) - 0.7).abs() < 1e-15);
    }
}
