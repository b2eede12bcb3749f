//! Domain types and the evolutionary machinery shared by every strategy:
//! dominance, non-dominated sorting, crowding, survivor selection, sampling
//! and variation.

mod sampling;
mod sorting;
mod types;
mod variation;

pub use sampling::{derive_rng, latin_hypercube_sample, SeededRng};
pub(crate) use sorting::{dominates_unchecked, weakly_dominates};
pub use sorting::{crowding_distance, dominates, environmental_selection, nondominated_sort};
pub use types::{
    euclidean, is_duplicate, squared_euclidean, Archive, BoundsBox, EvaluatedSample, RankedPopulation,
    DUPLICATE_TOLERANCE,
};
pub use variation::{
    binomial_crossover, polynomial_mutation, rank_based_mutation, sbx_crossover, sbx_crossover_unclipped,
};
