//! Group preference matching distributions.
//!
//! A single strict ranking is matched by the ε-geometric distribution
//! `p_(k) ∝ c^{k−1}` with `c = ε/(1−ε)`, under which every adjacent pair is
//! won with probability exactly `1 − ε`. A group's distribution is the
//! voter-wise average; as ε → 0 this tends to the first-place shares.

use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{embedding, Embedding};
use crate::distribution::ResponseDistribution;
use crate::error::{Error, Result};
use crate::profile::{PairwiseTally, PreferenceProfile, Ranking};
use crate::reward::{softmax, softmax_values, solve_mle, weights_gpm, RewardVector, SolverConfig};
use crate::rules::first_place_shares;
use crate::scalar::{Rational, Scalar};

/// Residual (in log-odds) below which a pooled tally counts as embeddable.
pub const EMBED_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum EpsilonPolicy<S> {
    /// Fixed `ε ∈ (0, 1/2)`.
    Finite(S),
    /// The `ε → 0` limit.
    Limit,
}

impl<S: Scalar> Default for EpsilonPolicy<S> {
    fn default() -> Self {
        EpsilonPolicy::Finite(S::ratio(1, 1000))
    }
}

impl<S: Scalar> EpsilonPolicy<S> {
    pub fn finite(eps: S) -> Result<Self> {
        let p = EpsilonPolicy::Finite(eps);
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if let EpsilonPolicy::Finite(eps) = self {
            check_epsilon(eps)?;
        }
        Ok(())
    }
}

fn check_epsilon<S: Scalar>(eps: &S) -> Result<()> {
    if eps.is_positive() && *eps < S::ratio(1, 2) {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon {eps} outside (0, 1/2)")))
    }
}

/// The preference matching distribution of one strict ranking:
/// `(1−c) c^{k−1} / (1−c^n)` at rank position `k`.
pub fn pm_geometric<S: Scalar>(ranking: &Ranking, eps: &S) -> Result<ResponseDistribution<S>> {
    if !ranking.is_strict() {
        return Err(Error::TiesNotAllowed);
    }
    check_epsilon(eps)?;
    let c = eps.clone() / (S::one() - eps.clone());
    let n = ranking.len();
    let mut mass = vec![S::zero(); n];
    let mut power = S::one();
    for &cand in &ranking.order() {
        mass[cand] = power.clone();
        power = power * c.clone();
    }
    ResponseDistribution::normalized(mass)
}

/// Voter-wise average of individual matching distributions; under
/// [`EpsilonPolicy::Limit`] this is the share of first places.
pub fn gpmd<S: Scalar>(
    profile: &PreferenceProfile,
    policy: &EpsilonPolicy<S>,
) -> Result<ResponseDistribution<S>> {
    policy.validate()?;
    let rankings = profile.rankings()?;
    match policy {
        EpsilonPolicy::Limit => first_place_shares(profile),
        EpsilonPolicy::Finite(eps) => {
            let parts = rankings
                .iter()
                .map(|r| pm_geometric(r, eps))
                .collect::<Result<Vec<_>>>()?;
            let weighted: Vec<(u64, &ResponseDistribution<S>)> =
                parts.iter().map(|d| (1, d)).collect();
            ResponseDistribution::mixture(&weighted)
        }
    }
}

/// Disjoint non-empty voter blocks covering `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let mut seen = vec![false; m];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("empty block"));
            }
            for &v in block {
                if v >= m || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::invalid(format!(
                        "voter {v} missing from 0..{m} or repeated"
                    )));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("voter {v} is in no block")));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        Ok(Self { blocks })
    }

    pub fn singletons(m: usize) -> Self {
        Self {
            blocks: (0..m).map(|v| vec![v]).collect(),
        }
    }

    pub fn whole(m: usize) -> Self {
        Self {
            blocks: vec![(0..m).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn merged(&self, a: usize, b: usize) -> Self {
        let mut blocks = self.blocks.clone();
        let moved = blocks.remove(b);
        blocks[a].extend(moved);
        let m = blocks.iter().map(Vec::len).sum();
        Self::new(blocks, m).expect("merge keeps a partition")
    }
}

/// How a block's pooled preferences are matched by one distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockFit {
    /// All members submitted the same ranking.
    Unanimous(Ranking),
    /// The pooled tally is interior and BT-consistent with these rewards.
    Interior(Vec<f64>),
}

/// Whether the pooled preferences of `block` are BT-embeddable.
pub fn block_fit(profile: &PreferenceProfile, block: &[usize]) -> Result<Option<BlockFit>> {
    let rankings = profile.rankings()?;
    let first = rankings[block[0]];
    if block.iter().all(|&v| rankings[v] == first) {
        return Ok(Some(BlockFit::Unanimous(first.clone())));
    }
    let tally = PairwiseTally::from_profile(&profile.select(block)?);
    Ok(match embedding(&tally)? {
        Embedding::Interior { rewards, residual } if residual <= EMBED_TOL => {
            Some(BlockFit::Interior(rewards))
        }
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub voters: Vec<usize>,
    /// Largest gap between the block's pooled matching distribution and the
    /// average of its members' individual ones.
    pub pooled_vs_members: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionGpmd {
    pub distribution: ResponseDistribution<f64>,
    pub blocks: Vec<BlockReport>,
}

/// The block-size weighted average of per-block matching distributions.
///
/// Under a finite ε, a unanimous block is matched by the ε-geometric
/// distribution of its ranking and an interior block by the softmax of its
/// recovered rewards. In the limit, every block is matched by its
/// first-place shares.
pub fn gpmd_via_partition(
    profile: &PreferenceProfile,
    partition: &Partition,
    policy: &EpsilonPolicy<Rational>,
) -> Result<PartitionGpmd> {
    policy.validate()?;
    if partition.blocks().iter().flatten().count() != profile.m()
        || partition
            .blocks()
            .iter()
            .flatten()
            .any(|&v| v >= profile.m())
    {
        return Err(Error::invalid(
            "partition does not cover the profile's voters",
        ));
    }
    let mut parts = Vec::with_capacity(partition.len());
    let mut blocks = Vec::with_capacity(partition.len());
    for (id, block) in partition.blocks().iter().enumerate() {
        let fit = block_fit(profile, block)?.ok_or(Error::BlockNotEmbeddable(id))?;
        let sub = profile.select(block)?;
        let members = gpmd(&sub, policy)?.to_f64();
        let pooled = match (policy, fit) {
            (EpsilonPolicy::Limit, _) => members.clone(),
            (EpsilonPolicy::Finite(eps), BlockFit::Unanimous(r)) => pm_geometric(&r, eps)?.to_f64(),
            (EpsilonPolicy::Finite(_), BlockFit::Interior(r)) => softmax_values(&r),
        };
        blocks.push(BlockReport {
            voters: block.clone(),
            pooled_vs_members: pooled.max_gap(&members)?.1,
        });
        parts.push((block.len() as u64, pooled));
    }
    let weighted: Vec<(u64, &ResponseDistribution<f64>)> =
        parts.iter().map(|(w, d)| (*w, d)).collect();
    Ok(PartitionGpmd {
        distribution: ResponseDistribution::mixture(&weighted)?,
        blocks,
    })
}

/// Partitions whose every block is embeddable: the singletons first, then a
/// greedy chain of merges, then single merges of two voters, at most
/// `budget` in total.
pub fn enumerate_embeddable_partitions(
    profile: &PreferenceProfile,
    budget: usize,
) -> Result<Vec<Partition>> {
    profile.rankings()?;
    let m = profile.m();
    let mut out = vec![Partition::singletons(m)];
    let mergeable = |p: &Partition, a: usize, b: usize| -> Result<bool> {
        let mut block = p.blocks()[a].clone();
        block.extend(&p.blocks()[b]);
        Ok(block_fit(profile, &block)?.is_some())
    };
    let first_merge = |p: &Partition| -> Result<Option<(usize, usize)>> {
        let k = p.len();
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .collect();
        pairs
            .into_par_iter()
            .map(|(a, b)| mergeable(p, a, b).map(|ok| ok.then_some((a, b))))
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            })
            .transpose()
            .map(Option::flatten)
    };

    let mut current = Partition::singletons(m);
    while out.len() < budget {
        match first_merge(&current)? {
            Some((a, b)) => {
                current = current.merged(a, b);
                out.push(current.clone());
            }
            None => break,
        }
    }
    let singletons = Partition::singletons(m);
    for a in 0..m {
        for b in a + 1..m {
            if out.len() >= budget {
                return Ok(out);
            }
            if mergeable(&singletons, a, b)? {
                let p = singletons.merged(a, b);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out.truncate(budget.max(1));
    Ok(out)
}

/// Target distribution, the MLE fitted to its matching weights, and the
/// distribution recovered from that fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpmPipeline {
    pub target: ResponseDistribution<f64>,
    pub fitted: RewardVector<f64>,
    pub recovered: ResponseDistribution<f64>,
}

impl GpmPipeline {
    /// `‖recovered − target‖∞`.
    pub fn gap(&self) -> f64 {
        self.recovered
            .max_gap(&self.target)
            .expect("same number of candidates")
            .1
    }
}

pub fn gpm_pipeline(
    profile: &PreferenceProfile,
    policy: &EpsilonPolicy<Rational>,
    config: &SolverConfig<f64>,
) -> Result<GpmPipeline> {
    let target = gpmd(profile, policy)?;
    let fitted = solve_mle(&weights_gpm(&target)?, config)?;
    let recovered = softmax(&fitted)?;
    Ok(GpmPipeline {
        target: target.to_f64(),
        fitted,
        recovered,
    })
}
