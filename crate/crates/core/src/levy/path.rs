//! Paths sampled on a regular fine grid of `[0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A process sampled at `j / cells`, `j = 0..=cells`, starting at zero.
///
/// The grid is dyadic (`cells = 2^q`) everywhere except in callers that
/// explicitly ask for another cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct FinePath<T> {
    values: Vec<T>,
}

impl<T: Scalar> FinePath<T> {
    /// Checks the invariants: at least one cell, origin zero, finite values.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a path needs at least 2 grid values, got {}",
                values.len()
            )));
        }
        if values[0] != T::zero() {
            return Err(Error::InvalidArgument("path must start at 0".into()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalGuard(format!("non-finite path value at grid index {j}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(cells: usize) -> Self {
        Self { values: vec![T::zero(); cells + 1] }
    }

    /// Path `t ↦ slope · t` on `cells` cells.
    pub fn linear(cells: usize, slope: T) -> Self {
        let n = T::from_usize_exact(cells);
        let values = (0..=cells)
            .map(|j| slope * T::from_usize_exact(j) / n)
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    /// Dyadic exponent `q` if `cells = 2^q`.
    pub fn q(&self) -> Option<u32> {
        let c = self.cells();
        c.is_power_of_two().then(|| c.trailing_zeros())
    }

    pub fn endpoint(&self) -> T {
        *self.values.last().expect("non-empty path")
    }

    /// Value at grid time `j / cells`.
    pub fn at(&self, j: usize) -> T {
        self.values[j]
    }

    /// Grid time of index `j`.
    pub fn time(&self, j: usize) -> f64 {
        j as f64 / self.cells() as f64
    }

    /// Values at the `k + 1` points of the coarse grid `i / k`.
    pub fn skeleton(&self, k: usize) -> Result<Vec<T>> {
        let step = cell_width(self.cells(), k)?;
        Ok((0..=k).map(|i| self.values[i * step]).collect())
    }

    /// See [`increments_on_grid`].
    pub fn increments(&self, k: usize) -> Result<Vec<T>> {
        increments_on_grid(self, k)
    }
}

/// Fine cells per coarse cell, or an error when `k` does not divide `cells`.
pub fn cell_width(cells: usize, k: usize) -> Result<usize> {
    if k == 0 || !cells.is_multiple_of(k) {
        return Err(Error::NotDivisible { k, cells });
    }
    Ok(cells / k)
}

/// Increments `path(i/k) - path((i-1)/k)` for `i = 1..=k`.
pub fn increments_on_grid<T: Scalar>(path: &FinePath<T>, k: usize) -> Result<Vec<T>> {
    let step = cell_width(path.cells(), k)?;
    let v = &path.values;
    Ok((1..=k).map(|i| v[i * step] - v[(i - 1) * step]).collect())
}

/// Number of fine cells for a dyadic resolution, rejecting `q < 1`.
pub fn dyadic_cells(q: u32) -> Result<usize> {
    if q < 1 {
        return Err(Error::InvalidResolution(q));
    }
    if q >= usize::BITS - 1 {
        return Err(Error::InvalidArgument(format!("resolution q = {q} too large")));
    }
    Ok(1usize << q)
}

/// A sampled Lévy path together with its additive parts, so that grid
/// increments can be formed as `drift·Δt + Σ jumps + Σ gaussian` without
/// differencing path values. Equal jump configurations in two cells then
/// produce bit-identical increments, which keeps atoms of the increment
/// law detectable as exact ties.
#[derive(Debug, Clone)]
pub struct LevyPath<T> {
    pub(crate) path: FinePath<T>,
    pub(crate) drift: f64,
    /// Per fine cell sum of jumps in time order (empty when jump-free).
    pub(crate) jump_parts: Vec<T>,
    /// Per fine cell Gaussian increment (empty when there is no Brownian part).
    pub(crate) gauss_parts: Vec<T>,
    pub(crate) jump_count: usize,
}

impl<T: Scalar> LevyPath<T> {
    pub fn path(&self) -> &FinePath<T> {
        &self.path
    }

    pub fn into_path(self) -> FinePath<T> {
        self.path
    }

    pub fn jump_count(&self) -> usize {
        self.jump_count
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Increments over the `k`-cell grid built from the additive parts.
    /// Agrees with [`increments_on_grid`] up to rounding.
    pub fn cell_increments(&self, k: usize) -> Result<Vec<T>> {
        let drift_part = T::lit(self.drift * (1.0 / k as f64));
        Ok(self.parts(k)?.into_iter().map(|(j, g)| drift_part + j + g).collect())
    }

    /// Cell increments without the drift term, which is the same in every
    /// cell. These keep their full precision when the drift dominates, as
    /// for a gamma subordinator with small shape, so they order the cells.
    pub fn drift_free_increments(&self, k: usize) -> Result<Vec<T>> {
        Ok(self.parts(k)?.into_iter().map(|(j, g)| j + g).collect())
    }

    fn parts(&self, k: usize) -> Result<Vec<(T, T)>> {
        let step = cell_width(self.path.cells(), k)?;
        let sum = |v: &[T], i: usize| {
            if v.is_empty() {
                T::zero()
            } else {
                v[i * step..(i + 1) * step].iter().fold(T::zero(), |a, &b| a + b)
            }
        };
        Ok((0..k).map(|i| (sum(&self.jump_parts, i), sum(&self.gauss_parts, i))).collect())
    }
}
