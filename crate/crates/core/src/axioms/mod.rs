//! Executable versions of the consistency axioms.
//!
//! Every checker returns an [`AxiomReport`]. When the premise of an axiom does
//! not hold (no Condorcet winner, no unanimous pair, ...) the report is
//! not applicable and counts as satisfied.

mod embed;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distribution::ResponseDistribution;
use crate::error::{Error, Result};
use crate::gpmd::{gpmd, EpsilonPolicy};
use crate::profile::profiles_equal_as_multisets;
use crate::profile::{automorphisms, transposition, PairwiseTally, PreferenceProfile, Ranking};
use crate::rules::{condorcet_winner, majority_winner, pm_consistent_ranking};
use crate::scalar::{Rational, Scalar};

pub use embed::{bt_embeddable, embedding, Embedding};
pub use search::{
    counterexample_search, counterexample_search_with, evaluate, CheckOptions, Counterexample,
    RuleUnderTest, SearchSpace, EXHAUSTIVE_LIMIT,
};

/// Default tolerance for comparing distributions.
pub const DIST_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    Pareto,
    Majority,
    PairwiseMajority,
    Condorcet,
    PreferenceMatching,
    PreferenceEquivalence,
    GroupPreferenceMatching,
}

impl AxiomId {
    pub const ALL: [AxiomId; 7] = [
        AxiomId::Pareto,
        AxiomId::Majority,
        AxiomId::PairwiseMajority,
        AxiomId::Condorcet,
        AxiomId::PreferenceMatching,
        AxiomId::PreferenceEquivalence,
        AxiomId::GroupPreferenceMatching,
    ];

    pub const ORDINAL: [AxiomId; 4] = [
        AxiomId::Pareto,
        AxiomId::Majority,
        AxiomId::PairwiseMajority,
        AxiomId::Condorcet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Pareto => "pareto",
            AxiomId::Majority => "majority",
            AxiomId::PairwiseMajority => "pairwise-majority",
            AxiomId::Condorcet => "condorcet",
            AxiomId::PreferenceMatching => "preference-matching",
            AxiomId::PreferenceEquivalence => "preference-equivalence",
            AxiomId::GroupPreferenceMatching => "group-preference-matching",
        }
    }

    /// Whether the axiom constrains a distribution rather than a ranking.
    pub fn is_distributional(self) -> bool {
        !AxiomId::ORDINAL.contains(&self)
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown axiom {s:?}")))
    }
}

/// What went wrong in a violated report.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `winner` should have been placed strictly above `loser`.
    Pair { winner: usize, loser: usize },
    /// `candidate` should have been the unique top.
    Candidate { candidate: usize },
    /// The required strict order, best first.
    Ranking { expected: Vec<usize> },
    /// Probabilities that should have agreed.
    Gap { i: usize, j: usize, gap: f64 },
    /// Largest coordinate gap against the required distribution.
    Distribution {
        candidate: usize,
        expected: f64,
        found: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub applicable: bool,
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    pub fn vacuous(axiom: AxiomId) -> Self {
        Self {
            axiom,
            applicable: false,
            satisfied: true,
            witness: None,
        }
    }

    pub fn holds(axiom: AxiomId) -> Self {
        Self {
            axiom,
            applicable: true,
            satisfied: true,
            witness: None,
        }
    }

    pub fn violated(axiom: AxiomId, witness: Witness) -> Self {
        Self {
            axiom,
            applicable: true,
            satisfied: false,
            witness: Some(witness),
        }
    }

    fn verdict(axiom: AxiomId, witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Self::violated(axiom, w),
            None => Self::holds(axiom),
        }
    }

    /// Relabel candidate indices in the witness.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let witness = self.witness.clone().map(|w| match w {
            Witness::Pair { winner, loser } => Witness::Pair {
                winner: perm[winner],
                loser: perm[loser],
            },
            Witness::Candidate { candidate } => Witness::Candidate {
                candidate: perm[candidate],
            },
            Witness::Ranking { expected } => Witness::Ranking {
                expected: expected.into_iter().map(|c| perm[c]).collect(),
            },
            Witness::Gap { i, j, gap } => Witness::Gap {
                i: perm[i],
                j: perm[j],
                gap,
            },
            Witness::Distribution {
                candidate,
                expected,
                found,
            } => Witness::Distribution {
                candidate: perm[candidate],
                expected,
                found,
            },
        });
        Self {
            witness,
            ..self.clone()
        }
    }
}

fn check_len(n: usize, found: usize) -> Result<()> {
    if n == found {
        Ok(())
    } else {
        Err(Error::dims(n, found))
    }
}

/// Every unanimously decided pair must be ordered the same way, strictly.
pub fn check_pareto(profile: &PreferenceProfile, ranking: &Ranking) -> Result<AxiomReport> {
    let n = profile.n();
    check_len(n, ranking.len())?;
    let tally = PairwiseTally::from_profile(profile);
    let level = ranking.levels();
    let mut applicable = false;
    for i in 0..n {
        for j in 0..n {
            let t = tally.totals()[i][j];
            if i != j && t > 0 && tally.wins()[i][j] == t {
                applicable = true;
                if level[i] >= level[j] {
                    return Ok(AxiomReport::violated(
                        AxiomId::Pareto,
                        Witness::Pair {
                            winner: i,
                            loser: j,
                        },
                    ));
                }
            }
        }
    }
    Ok(if applicable {
        AxiomReport::holds(AxiomId::Pareto)
    } else {
        AxiomReport::vacuous(AxiomId::Pareto)
    })
}

/// A candidate ranked first by a strict majority of voters must be the
/// unique top. Not applicable on generalized profiles.
pub fn check_majority(profile: &PreferenceProfile, ranking: &Ranking) -> Result<AxiomReport> {
    check_len(profile.n(), ranking.len())?;
    let winner = match majority_winner(profile) {
        Ok(Some(w)) => w,
        Ok(None) | Err(Error::NotCompleteProfile) => {
            return Ok(AxiomReport::vacuous(AxiomId::Majority))
        }
        Err(e) => return Err(e),
    };
    Ok(AxiomReport::verdict(
        AxiomId::Majority,
        (ranking.top() != Some(winner)).then_some(Witness::Candidate { candidate: winner }),
    ))
}

/// When pairwise majorities form a strict linear order, the ranking must be
/// exactly that order; a tie class fails.
pub fn check_pairwise_majority(tally: &PairwiseTally, ranking: &Ranking) -> Result<AxiomReport> {
    check_len(tally.n(), ranking.len())?;
    Ok(match pm_consistent_ranking(tally)? {
        None => AxiomReport::vacuous(AxiomId::PairwiseMajority),
        Some(expected) => AxiomReport::verdict(
            AxiomId::PairwiseMajority,
            (*ranking != expected).then(|| Witness::Ranking {
                expected: expected.order(),
            }),
        ),
    })
}

/// A Condorcet winner must be the unique top.
pub fn check_condorcet(tally: &PairwiseTally, ranking: &Ranking) -> Result<AxiomReport> {
    check_len(tally.n(), ranking.len())?;
    Ok(match condorcet_winner(tally)? {
        None => AxiomReport::vacuous(AxiomId::Condorcet),
        Some(w) => AxiomReport::verdict(
            AxiomId::Condorcet,
            (ranking.top() != Some(w)).then_some(Witness::Candidate { candidate: w }),
        ),
    })
}

/// On a BT-embeddable tally the distribution must reproduce every pairwise
/// proportion as `p_i / (p_i + p_j)`.
pub fn check_preference_matching(
    tally: &PairwiseTally,
    dist: &ResponseDistribution<f64>,
    tol: f64,
) -> Result<AxiomReport> {
    let n = tally.n();
    check_len(n, dist.len())?;
    match bt_embeddable(tally, tol) {
        Ok(Some(_)) => {}
        Ok(None) | Err(Error::UndefinedPair(..)) => {
            return Ok(AxiomReport::vacuous(AxiomId::PreferenceMatching))
        }
        Err(e) => return Err(e),
    }
    let p = dist.values();
    let mut worst: Option<Witness> = None;
    let mut worst_gap = tol;
    for i in 0..n {
        for j in i + 1..n {
            let target: f64 = tally.prop(i, j)?.to_real();
            let implied = if p[i] + p[j] > 0.0 {
                p[i] / (p[i] + p[j])
            } else {
                f64::NAN
            };
            let gap = (implied - target).abs();
            if !(gap <= worst_gap) {
                worst_gap = if gap.is_nan() { f64::INFINITY } else { gap };
                worst = Some(Witness::Gap {
                    i,
                    j,
                    gap: worst_gap,
                });
            }
        }
    }
    Ok(AxiomReport::verdict(AxiomId::PreferenceMatching, worst))
}

/// Whether some relabeling that maps `i` to `j` leaves the profile unchanged.
pub fn equally_preferred(profile: &PreferenceProfile, i: usize, j: usize) -> Result<bool> {
    profile.rankings()?;
    check_index(profile.n(), i)?;
    check_index(profile.n(), j)?;
    Ok(i == j || automorphisms(profile).iter().any(|perm| perm[i] == j))
}

/// Whether exchanging `i` and `j` in every ranking leaves the profile
/// unchanged.
pub fn swap_symmetric(profile: &PreferenceProfile, i: usize, j: usize) -> Result<bool> {
    profile.rankings()?;
    check_index(profile.n(), i)?;
    check_index(profile.n(), j)?;
    let swapped = profile.apply_permutation(&transposition(profile.n(), i, j))?;
    profiles_equal_as_multisets(profile, &swapped)
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if i < n {
        Ok(())
    } else {
        Err(Error::invalid(format!("candidate {i} out of range 0..{n}")))
    }
}

/// Pairs `(i, j)`, `i < j`, that are equally preferred.
pub fn equally_preferred_pairs(profile: &PreferenceProfile) -> Result<Vec<(usize, usize)>> {
    profile.rankings()?;
    let n = profile.n();
    let autos = automorphisms(profile);
    Ok((0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| autos.iter().any(|p| p[i] == j))
        .collect())
}

/// Equally preferred candidates must get equal probability.
pub fn check_preference_equivalence(
    profile: &PreferenceProfile,
    dist: &ResponseDistribution<f64>,
    tol: f64,
) -> Result<AxiomReport> {
    check_len(profile.n(), dist.len())?;
    let pairs = equally_preferred_pairs(profile)?;
    if pairs.is_empty() {
        return Ok(AxiomReport::vacuous(AxiomId::PreferenceEquivalence));
    }
    let p = dist.values();
    let witness = pairs
        .into_iter()
        .map(|(i, j)| (i, j, (p[i] - p[j]).abs()))
        .find(|&(_, _, gap)| !(gap <= tol))
        .map(|(i, j, gap)| Witness::Gap { i, j, gap });
    Ok(AxiomReport::verdict(
        AxiomId::PreferenceEquivalence,
        witness,
    ))
}

/// The distribution must equal the group preference matching distribution.
pub fn check_group_preference_matching(
    profile: &PreferenceProfile,
    dist: &ResponseDistribution<f64>,
    policy: &EpsilonPolicy<Rational>,
    tol: f64,
) -> Result<AxiomReport> {
    check_len(profile.n(), dist.len())?;
    let target = gpmd(profile, policy)?.to_f64();
    let (candidate, gap) = dist.max_gap(&target)?;
    Ok(AxiomReport::verdict(
        AxiomId::GroupPreferenceMatching,
        (!(gap <= tol)).then(|| Witness::Distribution {
            candidate,
            expected: target.values()[candidate],
            found: dist.values()[candidate],
        }),
    ))
}
