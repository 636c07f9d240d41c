//! Number of reordered increments from the fourth moment of the Lévy measure.

use crate::error::{Error, Result};

/// Suggested cell count `k ≈ sqrt(|ln μ4| / μ4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KRecommendation {
    /// Unrounded value of the formula.
    pub raw: f64,
    /// Power of two nearest to `raw` on a log scale (at least 1).
    pub k: usize,
}

/// Applies the rule to `mu4 ∈ (0, 1)`. An upper bound on `μ4` may be passed
/// instead of the exact value; on `(0, 1/e)` this can only lower `k`.
pub fn recommended_k(mu4: f64) -> Result<KRecommendation> {
    if !(mu4 > 0.0 && mu4 < 1.0) {
        return Err(Error::MomentOutOfRange(mu4));
    }
    let raw = (mu4.ln().abs() / mu4).sqrt();
    let exp = raw.log2().round().clamp(0.0, 62.0);
    Ok(KRecommendation { raw, k: 1usize << (exp as u32) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        let r = recommended_k(0.01).unwrap();
        assert!((r.raw - (4.605_170_185_988_091f64 / 0.01).sqrt()).abs() < 1e-12);
        assert_eq!(r.k, 16);
        let r = recommended_k((-1.0f64).exp()).unwrap();
        assert!((r.raw - 1f64.exp().sqrt()).abs() < 1e-12);
        assert_eq!(r.k, 2);
        assert_eq!(recommended_k(0.99).unwrap().k, 1);
    }

    #[test]
    fn out_of_range() {
        for bad in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(recommended_k(bad).is_err());
        }
    }
}
