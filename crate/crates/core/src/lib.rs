//! Statistical mechanics of electoral systems: exhaustive multinomial
//! ensembles over vote configurations, the closed-form fractional fluctuation
//! and its stability/rigidity decomposition, and sampling cross-checks.

pub mod combinatorics;
pub mod distribution;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numeric;

pub use combinatorics::{
    composition_count, enumerate_compositions, enumerate_partitions, partition_count,
    permutation_count, Compositions, PartitionSet, DEFAULT_ENUMERATION_CAP,
};
pub use distribution::{binomial_marginal, multinomial_pmf, multiplicity, WeightedTally};
pub use dynamics::{
    brute_force_fractional_fluctuation, closed_form_attributes, flexibility_bounds,
    flexibility_gradient, rigidity_bounds, DynamicAttributes, FlexibilityGradient,
};
pub use ensemble::{
    brute_force_report, directional_self_product, magnitudal_average, spherical_cross_term,
    EnsembleReport,
};
pub use error::{Error, Result};
pub use model::{
    equilibrium_coordinates, excess_coordinates, validate_system, ElectoralSystem,
    PartitionShape, PartyDistribution, Tally,
};
pub use montecarlo::{estimate_marginal, estimate_variance, sample_tally, McEstimate};
