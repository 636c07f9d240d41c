//! Couplings of Brownian motion to Lévy processes by reordering increments.
//!
//! Paths and couplings are generic over the [`Scalar`] type (`f64` or
//! `f32`); the aliases below name the common `f64` instances.

pub mod coupling;
pub mod error;
pub mod levy;
pub mod metrics;
pub mod mlmc;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{CompensatedSum, Scalar};

pub type FinePathF64 = levy::FinePath<f64>;
pub type LevyPathF64 = levy::LevyPath<f64>;
pub type CoupledPathsF64 = coupling::CoupledPaths<f64>;
pub type TrivariatePathsF64 = coupling::TrivariatePaths<f64>;
