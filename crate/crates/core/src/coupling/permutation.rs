//! Rank-matching permutations.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A bijection of `0..k`; cell `i` receives source cell `pi[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    pi: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self { pi: (0..k).collect() }
    }

    pub fn from_vec(pi: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; pi.len()];
        for &p in &pi {
            if p >= pi.len() || seen[p] {
                return Err(Error::InvalidArgument(format!("{pi:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self { pi })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `[v[pi[0]], v[pi[1]], ...]`.
    pub fn apply<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.pi.iter().map(|&p| v[p]).collect()
    }
}

fn lex_order<T: Scalar>(dx: &[T], ties: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dx.len()).collect();
    idx.sort_by(|&a, &b| {
        dx[a]
            .total_cmp_scalar(&dx[b])
            .then_with(|| ties[a].total_cmp(&ties[b]))
            .then_with(|| a.cmp(&b))
    });
    idx
}

/// Ranks of `values` (0-based) under `(value, index)` order.
pub fn rank_vector<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp_scalar(&values[b]).then_with(|| a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i] = r;
    }
    ranks
}

/// Permutation assigning the `dw` values to cells in the rank order of
/// `(dx, ties)`: the rank of `dw[pi[i]]` among `dw` equals the rank of
/// `(dx[i], ties[i])` in lexicographic order.
///
/// Repeated `dw` values are ordered by index, with a warning.
pub fn rank_permutation<T: Scalar>(dx: &[T], ties: &[f64], dw: &[T]) -> Result<Permutation> {
    if dx.len() != dw.len() {
        return Err(Error::LengthMismatch { left: dx.len(), right: dw.len() });
    }
    if ties.len() != dx.len() {
        return Err(Error::LengthMismatch { left: dx.len(), right: ties.len() });
    }
    let by_x = lex_order(dx, ties);
    let mut by_w: Vec<usize> = (0..dw.len()).collect();
    by_w.sort_by(|&a, &b| dw[a].total_cmp_scalar(&dw[b]).then_with(|| a.cmp(&b)));
    if by_w.windows(2).any(|p| dw[p[0]].total_cmp_scalar(&dw[p[1]]) == Ordering::Equal) {
        log::warn!("repeated Brownian increments; ordering them by cell index");
    }
    let mut pi = vec![0; dx.len()];
    for (&i, &j) in by_x.iter().zip(&by_w) {
        pi[i] = j;
    }
    Ok(Permutation { pi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_inputs_give_identity() {
        let p = rank_permutation(&[1.0, 2.0, 3.0], &[0.5; 3], &[-1.0, 0.0, 4.0]).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn reversed_inputs_give_reversal() {
        let p = rank_permutation(&[3.0, 2.0, 1.0, 0.0], &[0.5; 4], &[-1.0, 0.0, 4.0, 5.0]).unwrap();
        assert_eq!(p.as_slice(), &[3, 2, 1, 0]);
    }

    #[test]
    fn ties_follow_uniforms() {
        let p = rank_permutation(&[1.0, 1.0], &[0.9, 0.1], &[10.0, 20.0]).unwrap();
        assert_eq!(p.apply(&[10.0, 20.0]), vec![20.0, 10.0]);
    }

    #[test]
    fn length_mismatch() {
        assert!(rank_permutation(&[1.0f64, 2.0], &[0.5; 2], &[1.0]).is_err());
        assert!(rank_permutation(&[1.0f64, 2.0], &[0.5], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rank_vector_basic() {
        assert_eq!(rank_vector(&[0.3f64, -1.0, 2.0]), vec![1, 0, 2]);
        assert!(Permutation::from_vec(vec![0, 0]).is_err());
    }
}
