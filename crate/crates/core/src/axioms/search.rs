use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_condorcet, check_group_preference_matching, check_majority, check_pairwise_majority,
    check_pareto, check_preference_equivalence, check_preference_matching, AxiomId, AxiomReport,
    DIST_TOL,
};
use crate::distribution::ResponseDistribution;
use crate::error::{Error, Result};
use crate::gpmd::{gpm_pipeline, EpsilonPolicy};
use crate::profile::{
    pair_count, permutation_from_index, seeded_rng, tournament_profile, Assumption1Model,
    PairwiseTally, PreferenceProfile, Ranking,
};
use crate::profile::{random_assumption1, random_complete};
use crate::reward::{
    rank_by_scores, softmax, solve_mle, weights_copeland, weights_standard, SolverConfig,
    WeightMatrix,
};
use crate::rules::{
    borda_scores, copeland_scores, first_place_shares, ranking_from_scores, RankTiePolicy,
    TiePolicy,
};
use crate::scalar::Rational;

/// Largest exhaustive space a search will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// Rewards closer than this are treated as tied when ranking a solver output.
const REWARD_TIE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleUnderTest {
    Borda,
    Copeland,
    MleStandard,
    MleCopeland,
    MleGpm,
    GpmdLimit,
}

impl RuleUnderTest {
    pub const ALL: [RuleUnderTest; 6] = [
        RuleUnderTest::Borda,
        RuleUnderTest::Copeland,
        RuleUnderTest::MleStandard,
        RuleUnderTest::MleCopeland,
        RuleUnderTest::MleGpm,
        RuleUnderTest::GpmdLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleUnderTest::Borda => "borda",
            RuleUnderTest::Copeland => "copeland",
            RuleUnderTest::MleStandard => "mle-standard",
            RuleUnderTest::MleCopeland => "mle-copeland",
            RuleUnderTest::MleGpm => "mle-gpm",
            RuleUnderTest::GpmdLimit => "gpmd-limit",
        }
    }

    /// Whether the rule also outputs a distribution.
    pub fn is_probabilistic(self) -> bool {
        !matches!(self, RuleUnderTest::Borda | RuleUnderTest::Copeland)
    }

    /// The aggregate ranking, or `None` where the rule is undefined on this
    /// profile (e.g. a profile-level rule on pairwise-only ballots).
    pub fn ranking(
        self,
        profile: &PreferenceProfile,
        opts: &CheckOptions,
    ) -> Result<Option<Ranking>> {
        let tally = PairwiseTally::from_profile(profile);
        let out = match self {
            RuleUnderTest::Borda => {
                borda_scores::<Rational>(&tally).map(|s| s.ranking(RankTiePolicy::GroupTies))
            }
            RuleUnderTest::Copeland => copeland_scores::<Rational>(&tally, TiePolicy::HalfPoint)
                .map(|s| s.ranking(RankTiePolicy::GroupTies)),
            RuleUnderTest::MleStandard => {
                let w: WeightMatrix<Rational> = weights_standard(&tally);
                if w.is_constant_total() {
                    rank_by_scores(&w, RankTiePolicy::GroupTies)
                } else {
                    return Ok(converged_ranking(&w, &opts.solver));
                }
            }
            RuleUnderTest::MleCopeland => {
                weights_copeland::<Rational>(&tally, TiePolicy::HalfPoint)
                    .and_then(|w| rank_by_scores(&w, RankTiePolicy::GroupTies))
            }
            RuleUnderTest::MleGpm => gpm_pipeline(profile, &opts.gpm_epsilon, &opts.solver)
                .map(|out| out.fitted.ranking(REWARD_TIE_TOL)),
            RuleUnderTest::GpmdLimit => first_place_shares::<Rational>(profile)
                .map(|d| ranking_from_scores(d.values(), RankTiePolicy::GroupTies)),
        };
        undefined_as_none(out)
    }

    /// The aggregate distribution; `None` for ordinal rules and where the
    /// rule has no finite answer.
    pub fn distribution(
        self,
        profile: &PreferenceProfile,
        opts: &CheckOptions,
    ) -> Result<Option<ResponseDistribution<f64>>> {
        let tally = PairwiseTally::from_profile(profile);
        let out = match self {
            RuleUnderTest::Borda | RuleUnderTest::Copeland => return Ok(None),
            RuleUnderTest::MleStandard => {
                return converged_softmax(&weights_standard::<Rational>(&tally), &opts.solver)
            }
            RuleUnderTest::MleCopeland => {
                match weights_copeland::<Rational>(&tally, TiePolicy::HalfPoint) {
                    Ok(w) => return converged_softmax(&w, &opts.solver),
                    Err(e) => Err(e),
                }
            }
            RuleUnderTest::MleGpm => {
                gpm_pipeline(profile, &opts.gpm_epsilon, &opts.solver).map(|o| o.recovered)
            }
            RuleUnderTest::GpmdLimit => first_place_shares::<Rational>(profile).map(|d| d.to_f64()),
        };
        undefined_as_none(out)
    }
}

fn undefined_as_none<T>(out: Result<T>) -> Result<Option<T>> {
    match out {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::NotCompleteProfile
            | Error::UndefinedPair(..)
            | Error::DisconnectedGraph
            | Error::ZeroProbability(_)
            | Error::NotConverged,
        ) => Ok(None),
        Err(e) => Err(e),
    }
}

fn converged_ranking(w: &WeightMatrix<Rational>, solver: &SolverConfig<f64>) -> Option<Ranking> {
    solve_mle(w, solver)
        .ok()
        .filter(|r| r.is_converged())
        .map(|r| r.ranking(REWARD_TIE_TOL))
}

fn converged_softmax(
    w: &WeightMatrix<Rational>,
    solver: &SolverConfig<f64>,
) -> Result<Option<ResponseDistribution<f64>>> {
    undefined_as_none(solve_mle(w, solver).and_then(|r| softmax(&r)))
}

impl fmt::Display for RuleUnderTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleUnderTest {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RuleUnderTest::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown rule {s:?}")))
    }
}

/// Knobs shared by every check in a search.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    /// Tolerance for distribution comparisons.
    pub tol: f64,
    /// ε used by the group preference matching axiom.
    pub target_epsilon: EpsilonPolicy<Rational>,
    /// ε used to build the MLE-GPM rule's target.
    pub gpm_epsilon: EpsilonPolicy<Rational>,
    pub solver: SolverConfig<f64>,
    /// Cap on the size of exhaustive spaces.
    pub limit: u128,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: DIST_TOL,
            target_epsilon: EpsilonPolicy::Limit,
            gpm_epsilon: EpsilonPolicy::default(),
            solver: SolverConfig::default(),
            limit: EXHAUSTIVE_LIMIT,
        }
    }
}

/// Verdict of `axiom` on `rule`'s output for `profile`; `None` when the rule
/// or the axiom is undefined there.
pub fn evaluate(
    rule: RuleUnderTest,
    axiom: AxiomId,
    profile: &PreferenceProfile,
    opts: &CheckOptions,
) -> Result<Option<AxiomReport>> {
    let tally = PairwiseTally::from_profile(profile);
    if !axiom.is_distributional() {
        let Some(ranking) = rule.ranking(profile, opts)? else {
            return Ok(None);
        };
        let report = match axiom {
            AxiomId::Pareto => check_pareto(profile, &ranking),
            AxiomId::Majority => check_majority(profile, &ranking),
            AxiomId::PairwiseMajority => check_pairwise_majority(&tally, &ranking),
            _ => check_condorcet(&tally, &ranking),
        };
        return undefined_as_none(report);
    }
    if !rule.is_probabilistic() {
        return Err(Error::invalid(format!(
            "{rule} outputs no distribution; {axiom} does not apply"
        )));
    }
    let Some(dist) = rule.distribution(profile, opts)? else {
        return Ok(None);
    };
    let report = match axiom {
        AxiomId::PreferenceMatching => check_preference_matching(&tally, &dist, opts.tol),
        AxiomId::PreferenceEquivalence => check_preference_equivalence(profile, &dist, opts.tol),
        _ => check_group_preference_matching(profile, &dist, &opts.target_epsilon, opts.tol),
    };
    undefined_as_none(report)
}

/// A family of profiles enumerated in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SearchSpace {
    /// Every ordered tuple of `m` strict rankings, `(n!)^m` profiles.
    ExhaustiveComplete { n: usize, m: usize },
    RandomComplete {
        n: usize,
        m: usize,
        trials: u64,
        seed: u64,
    },
    /// Random tournaments, one labeler per pair.
    Assumption1 { n: usize, trials: u64, seed: u64 },
    /// All `2^{C(n,2)}` tournaments.
    Assumption1Exhaustive { n: usize },
}

impl SearchSpace {
    pub fn size(&self) -> u128 {
        match *self {
            SearchSpace::ExhaustiveComplete { n, m } => {
                let fact: u128 = (1..=n as u128).product();
                (0..m)
                    .try_fold(1u128, |acc, _| acc.checked_mul(fact))
                    .unwrap_or(u128::MAX)
            }
            SearchSpace::RandomComplete { trials, .. }
            | SearchSpace::Assumption1 { trials, .. } => trials as u128,
            SearchSpace::Assumption1Exhaustive { n } => {
                1u128.checked_shl(pair_count(n) as u32).unwrap_or(u128::MAX)
            }
        }
    }

    fn validate(&self, limit: u128) -> Result<()> {
        let n = match *self {
            SearchSpace::ExhaustiveComplete { n, m } | SearchSpace::RandomComplete { n, m, .. } => {
                if m == 0 {
                    return Err(Error::invalid("at least one voter is required"));
                }
                n
            }
            SearchSpace::Assumption1 { n, .. } | SearchSpace::Assumption1Exhaustive { n } => n,
        };
        if n < 2 {
            return Err(Error::invalid("at least two candidates are required"));
        }
        let exhaustive = matches!(
            self,
            SearchSpace::ExhaustiveComplete { .. } | SearchSpace::Assumption1Exhaustive { .. }
        );
        if exhaustive && self.size() > limit {
            return Err(Error::SpaceTooLarge {
                size: self.size(),
                limit,
            });
        }
        Ok(())
    }

    /// The `index`-th profile of the space.
    pub fn profile_at(&self, index: u64) -> Result<PreferenceProfile> {
        match *self {
            SearchSpace::ExhaustiveComplete { n, m } => {
                let fact: u64 = (1..=n as u64).product();
                let mut rest = index;
                let rankings: Vec<Vec<usize>> = (0..m)
                    .map(|_| {
                        let digit = rest % fact;
                        rest /= fact;
                        permutation_from_index(n, digit as usize)
                    })
                    .collect();
                PreferenceProfile::from_rankings(n, &rankings)
            }
            SearchSpace::RandomComplete { n, m, seed, .. } => {
                random_complete(n, m, &mut seeded_rng(seed, index))
            }
            SearchSpace::Assumption1 { n, seed, .. } => random_assumption1(
                n,
                Assumption1Model::RandomTournament,
                &mut seeded_rng(seed, index),
            ),
            SearchSpace::Assumption1Exhaustive { n } => tournament_profile(n, index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    /// Position of the profile in the space's enumeration order.
    pub index: u64,
    #[serde(skip)]
    pub profile: PreferenceProfile,
    pub report: AxiomReport,
}

pub fn counterexample_search(
    rule: RuleUnderTest,
    axiom: AxiomId,
    space: SearchSpace,
) -> Result<Option<Counterexample>> {
    counterexample_search_with(rule, axiom, space, &CheckOptions::default())
}

/// The lowest-index profile in `space` on which `rule` violates `axiom`.
/// Runs on the current rayon pool; the answer does not depend on its size.
pub fn counterexample_search_with(
    rule: RuleUnderTest,
    axiom: AxiomId,
    space: SearchSpace,
    opts: &CheckOptions,
) -> Result<Option<Counterexample>> {
    space.validate(opts.limit)?;
    if axiom.is_distributional() && !rule.is_probabilistic() {
        return Err(Error::invalid(format!(
            "{rule} outputs no distribution; {axiom} does not apply"
        )));
    }
    let size = u64::try_from(space.size()).map_err(|_| Error::SpaceTooLarge {
        size: space.size(),
        limit: u64::MAX as u128,
    })?;
    (0..size)
        .into_par_iter()
        .find_map_first(|index| {
            let step = || -> Result<Option<Counterexample>> {
                let profile = space.profile_at(index)?;
                Ok(match evaluate(rule, axiom, &profile, opts)? {
                    Some(report) if !report.satisfied => Some(Counterexample {
                        index,
                        profile,
                        report,
                    }),
                    _ => None,
                })
            };
            step().transpose()
        })
        .transpose()
}
