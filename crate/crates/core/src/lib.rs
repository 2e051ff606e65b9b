//! Preference aggregation: profiles and pairwise tallies, classical voting
//! rules, the weighted Bradley–Terry reward MLE, group preference matching
//! distributions, and mechanical checkers for the axioms relating them.
//!
//! Exact quantities are generic over [`Scalar`]; the aliases below fix the
//! types used by the rest of the toolkit.

pub mod axioms;
pub mod distribution;
pub mod error;
pub mod gpmd;
pub mod profile;
pub mod reward;
pub mod rules;
pub mod scalar;

#[cfg(test)]
mod fixtures;

pub use distribution::ResponseDistribution;
pub use error::{Error, Result};
pub use profile::{
    Ballot, CandidateSet, Comparison, PairwiseTally, PreferenceProfile, ProfileKind, Ranking, Voter,
};
pub use scalar::{Rational, Real, Scalar};

/// Floating point distribution, as produced by softmax.
pub type Distribution = ResponseDistribution<f64>;
/// Exact distribution (first-place shares, closed-form ε-geometric).
pub type ExactDistribution = ResponseDistribution<Rational>;
/// Exact loss weights.
pub type Weights = reward::WeightMatrix<Rational>;
/// Exact score vector.
pub type Scores = rules::ScoreVector<Rational>;
/// Solver output in double precision.
pub type Rewards = reward::RewardVector<f64>;
pub type Solver = reward::SolverConfig<f64>;
