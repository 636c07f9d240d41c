//! Rank matching of two equally sized samples.

use crate::error::{Error, Result};

/// Returns the `u_index`-th order statistics (1-based) of both samples.
/// With `u_index` uniform on `1..=n`, each coordinate has the empirical law
/// of its sample and the pair is comonotone.
pub fn empirical_rank_coupling(xi_samples: &[f64], zeta_samples: &[f64], u_index: usize) -> Result<(f64, f64)> {
    if xi_samples.len() != zeta_samples.len() {
        return Err(Error::LengthMismatch { left: xi_samples.len(), right: zeta_samples.len() });
    }
    if xi_samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if u_index == 0 || u_index > xi_samples.len() {
        return Err(Error::InvalidArgument(format!(
            "rank {u_index} outside 1..={}",
            xi_samples.len()
        )));
    }
    let mut a = xi_samples.to_vec();
    let mut b = zeta_samples.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok((a[u_index - 1], b[u_index - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_rank_matching() {
        assert_eq!(empirical_rank_coupling(&[3.0, 1.0, 2.0], &[20.0, 30.0, 10.0], 2).unwrap(), (2.0, 20.0));
        assert_eq!(empirical_rank_coupling(&[5.0], &[-1.0], 1).unwrap(), (5.0, -1.0));
        let a = [0.3, -2.0, 7.0];
        for i in 1..=3 {
            let (x, y) = empirical_rank_coupling(&a, &a, i).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(empirical_rank_coupling(&[], &[], 1), Err(Error::EmptyInput));
        assert!(empirical_rank_coupling(&[1.0], &[1.0, 2.0], 1).is_err());
        assert!(empirical_rank_coupling(&[1.0], &[1.0], 2).is_err());
    }
}
