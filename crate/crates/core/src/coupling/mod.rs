//! Couplings of a Lévy path with a Brownian path.

mod ecdf;
mod kselect;
mod permutation;
mod rank;
mod reorder;

pub use ecdf::{endpoint_comonotone, exact_drift_free_law, exact_law, ComonotoneLaw, EmpiricalCdf, GammaLaw, NormalLaw, SmoothedCdf};
pub use kselect::{recommended_k, KRecommendation};
pub use permutation::{rank_permutation, rank_vector, Permutation};
pub use rank::empirical_rank_coupling;
pub use reorder::{
    comonotone_increment_coupling, couple_path, hierarchical_coupling, reorder_coupling, CoupledPaths, TrivariatePaths,
};
