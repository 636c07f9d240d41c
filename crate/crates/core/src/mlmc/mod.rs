//! Multilevel Monte Carlo for functionals of Lévy processes whose small
//! jumps are replaced by Brownian motion, with level pairs coupled either
//! independently or by increment reordering.

mod driver;
mod functional;
mod level;
mod pair;

pub use driver::{mlmc_run, LevelRow, MlmcConfig, MlmcResult};
pub use functional::Functional;
pub use level::{decompose_level, grid_cells, truncation, LevelSpec, MlmcBase, MlmcLevel};
pub use pair::{estimate_level_stats, sample_coupled_pair, sample_level_batch, CouplingMode, LevelStats, PairSample};
