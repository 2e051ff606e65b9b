//! Classical social-choice rules evaluated on pairwise tallies.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::distribution::ResponseDistribution;
use crate::error::{Error, Result};
use crate::profile::{majority_relation, PairwiseTally, PreferenceProfile, Ranking};
use crate::scalar::Scalar;

/// How an exact pairwise tie (`P = 1/2`) is scored by Copeland.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// A tie earns nothing.
    StrictOnly,
    /// A tie earns half a point for each side.
    #[default]
    HalfPoint,
}

/// How equal scores are turned into a ranking.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankTiePolicy {
    /// Break ties by candidate index (lower first).
    Lexicographic,
    /// Put equal scores in one indifference class.
    #[default]
    GroupTies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreRule {
    Borda,
    Copeland,
    GeneralScore,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector<S> {
    pub values: Vec<S>,
    pub rule: ScoreRule,
}

impl<S: Scalar> ScoreVector<S> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> S {
        self.values.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn ranking(&self, policy: RankTiePolicy) -> Ranking {
        ranking_from_scores(&self.values, policy)
    }
}

/// `BC_i = Σ_{k≠i} P(y_i ≻ y_k)`.
pub fn borda_scores<S: Scalar>(tally: &PairwiseTally) -> Result<ScoreVector<S>> {
    tally.require_complete()?;
    let n = tally.n();
    let values = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| k != i)
                .map(|k| S::ratio(tally.wins()[i][k], tally.totals()[i][k]))
                .fold(S::zero(), |a, b| a + b)
        })
        .collect();
    Ok(ScoreVector {
        values,
        rule: ScoreRule::Borda,
    })
}

/// Number of pairwise majority wins, plus half a point per tie under
/// [`TiePolicy::HalfPoint`].
pub fn copeland_scores<S: Scalar>(
    tally: &PairwiseTally,
    ties: TiePolicy,
) -> Result<ScoreVector<S>> {
    tally.require_complete()?;
    let n = tally.n();
    let half = S::ratio(1, 2);
    let values = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| k != i)
                .map(|k| match majority_cmp(tally, i, k) {
                    Ordering::Greater => S::one(),
                    Ordering::Equal if ties == TiePolicy::HalfPoint => half.clone(),
                    _ => S::zero(),
                })
                .fold(S::zero(), |a, b| a + b)
        })
        .collect();
    Ok(ScoreVector {
        values,
        rule: ScoreRule::Copeland,
    })
}

/// Sign of `P(y_i ≻ y_j) − 1/2`, decided on integer counts.
pub(crate) fn majority_cmp(tally: &PairwiseTally, i: usize, j: usize) -> Ordering {
    tally.wins()[i][j].cmp(&tally.wins()[j][i])
}

/// The candidate beating every other one in pairwise majority.
pub fn condorcet_winner(tally: &PairwiseTally) -> Result<Option<usize>> {
    tally.require_complete()?;
    let n = tally.n();
    Ok((0..n).find(|&c| (0..n).all(|k| k == c || majority_cmp(tally, c, k) == Ordering::Greater)))
}

/// The candidate ranked first by more than half of the voters.
pub fn majority_winner(profile: &PreferenceProfile) -> Result<Option<usize>> {
    let rankings = profile.rankings()?;
    let mut firsts = vec![0usize; profile.n()];
    for r in &rankings {
        firsts[r.order()[0]] += 1;
    }
    Ok(firsts.iter().position(|&f| 2 * f > rankings.len()))
}

/// The strict ranking agreeing with every pairwise majority, when the
/// majority relation is a strict linear order.
pub fn pm_consistent_ranking(tally: &PairwiseTally) -> Result<Option<Ranking>> {
    tally.require_complete()?;
    Ok(majority_relation(tally)
        .linear_order()
        .map(|order| Ranking::strict(order).expect("topological order is a permutation")))
}

/// Order candidates by descending score.
pub fn ranking_from_scores<S: PartialOrd>(scores: &[S], policy: RankTiePolicy) -> Ranking {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    // Stable sort keeps index order among equal scores.
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    let tiers = match policy {
        RankTiePolicy::Lexicographic => idx.into_iter().map(|c| vec![c]).collect(),
        RankTiePolicy::GroupTies => {
            let mut tiers: Vec<Vec<usize>> = Vec::new();
            for c in idx {
                match tiers.last_mut() {
                    Some(t) if scores[t[0]].partial_cmp(&scores[c]) == Some(Ordering::Equal) => {
                        t.push(c)
                    }
                    _ => tiers.push(vec![c]),
                }
            }
            tiers
        }
    };
    Ranking::from_tiers(tiers).expect("scores index every candidate once")
}

/// `p_i = #(y_i ranked first) / m`.
pub fn first_place_shares<S: Scalar>(
    profile: &PreferenceProfile,
) -> Result<ResponseDistribution<S>> {
    let rankings = profile.rankings()?;
    let m = rankings.len() as u64;
    let mut firsts = vec![0u64; profile.n()];
    for r in &rankings {
        firsts[r.order()[0]] += 1;
    }
    ResponseDistribution::new(firsts.into_iter().map(|f| S::ratio(f, m)).collect())
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict-only" | "strict" => Ok(TiePolicy::StrictOnly),
            "half-point" | "half" => Ok(TiePolicy::HalfPoint),
            other => Err(Error::invalid(format!("unknown tie policy {other:?}"))),
        }
    }
}
