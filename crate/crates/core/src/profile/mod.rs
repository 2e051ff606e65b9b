//! Candidates, voters, ballots and preference profiles.
//!
//! A profile is either *complete* (every voter submits a strict total
//! ranking) or *generalized* (some voter submits a bare set of pairwise
//! comparisons, which may be incomplete or cyclic).

mod generate;
mod json;
mod tally;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use generate::{
    all_rankings, generate_assumption1, generate_complete, pair_count, pairs_of,
    permutation_from_index, seeded_rng, tournament_profile, Assumption1Model,
};
pub(crate) use generate::{random_assumption1, random_complete};
pub use json::{parse_profile, serialize_profile};
pub use tally::{
    has_condorcet_cycle, is_transitive, majority_relation, MajorityRelation, Outcome, PairwiseTally,
};

/// Ordered set of distinct candidate labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl CandidateSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(Error::invalid("at least two candidates are required"));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invalid(format!("candidate {i} has an empty label")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate candidate label {name:?}"
                )));
            }
        }
        Ok(Self { names, index })
    }

    /// Candidates labelled `y1..yn`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("y{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// One pairwise judgment: `winner` is preferred to `loser`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparison {
    pub winner: usize,
    pub loser: usize,
}

impl Comparison {
    pub fn new(winner: usize, loser: usize) -> Self {
        Self { winner, loser }
    }
}

/// A weak order over candidates, stored as indifference classes from most to
/// least preferred. Members of a class are kept in ascending index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    tiers: Vec<Vec<usize>>,
}

impl Ranking {
    /// A strict ranking; `order[0]` is the most preferred candidate.
    pub fn strict(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order)?;
        Ok(Self {
            tiers: order.into_iter().map(|c| vec![c]).collect(),
        })
    }

    pub fn from_tiers(tiers: Vec<Vec<usize>>) -> Result<Self> {
        if tiers.iter().any(Vec::is_empty) {
            return Err(Error::invalid("empty indifference class"));
        }
        let flat: Vec<usize> = tiers.iter().flatten().copied().collect();
        check_permutation(&flat)?;
        let tiers = tiers
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        Ok(Self { tiers })
    }

    /// Number of candidates ranked.
    pub fn len(&self) -> usize {
        self.tiers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.is_empty()
    }

    pub fn tiers(&self) -> &[Vec<usize>] {
        &self.tiers
    }

    pub fn order(&self) -> Vec<usize> {
        self.tiers.iter().flatten().copied().collect()
    }

    pub fn is_strict(&self) -> bool {
        self.tiers.iter().all(|t| t.len() == 1)
    }

    /// Tier index of every candidate.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0; self.len()];
        for (k, tier) in self.tiers.iter().enumerate() {
            for &c in tier {
                level[c] = k;
            }
        }
        level
    }

    /// The unique most preferred candidate, if the first class is a singleton.
    pub fn top(&self) -> Option<usize> {
        match self.tiers.first() {
            Some(t) if t.len() == 1 => Some(t[0]),
            _ => None,
        }
    }

    /// Whether `a` is placed strictly above `b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        let level = self.levels();
        level[a] < level[b]
    }

    /// All `C(n,2)` comparisons implied by a strict ranking.
    pub fn comparisons(&self) -> Vec<Comparison> {
        let order = self.order();
        let mut out = Vec::with_capacity(order.len() * order.len().saturating_sub(1) / 2);
        for (a, &w) in order.iter().enumerate() {
            for &l in &order[a + 1..] {
                out.push(Comparison::new(w, l));
            }
        }
        out
    }

    /// Relabel: candidate `c` becomes `perm[c]`.
    pub fn permuted(&self, perm: &[usize]) -> Ranking {
        Ranking::from_tiers(
            self.tiers
                .iter()
                .map(|t| t.iter().map(|&c| perm[c]).collect())
                .collect(),
        )
        .expect("permutation of a valid ranking")
    }
}

fn check_permutation(order: &[usize]) -> Result<()> {
    let mut seen = vec![false; order.len()];
    for &c in order {
        if c >= order.len() || std::mem::replace(&mut seen[c], true) {
            return Err(Error::invalid(format!(
                "{order:?} is not a permutation of 0..{}",
                order.len()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ballot {
    /// Strict total ranking, best first.
    Ranked(Ranking),
    /// Pairwise judgments; each unordered pair appears at most once.
    Comparisons(Vec<Comparison>),
}

impl Ballot {
    pub fn comparisons(&self) -> Vec<Comparison> {
        match self {
            Ballot::Ranked(r) => r.comparisons(),
            Ballot::Comparisons(c) => c.clone(),
        }
    }

    fn permuted(&self, perm: &[usize]) -> Ballot {
        match self {
            Ballot::Ranked(r) => Ballot::Ranked(r.permuted(perm)),
            Ballot::Comparisons(cs) => Ballot::Comparisons(
                cs.iter()
                    .map(|c| Comparison::new(perm[c.winner], perm[c.loser]))
                    .collect(),
            ),
        }
    }

    /// Voter-identity-free form used for multiset comparison.
    fn canonical(&self) -> (u8, Vec<(usize, usize)>) {
        match self {
            Ballot::Ranked(r) => (0, r.order().into_iter().map(|c| (c, 0)).collect()),
            Ballot::Comparisons(cs) => {
                let mut v: Vec<_> = cs.iter().map(|c| (c.winner, c.loser)).collect();
                v.sort_unstable();
                (1, v)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Voter {
    pub id: String,
    pub ballot: Ballot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Complete,
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceProfile {
    candidates: CandidateSet,
    voters: Vec<Voter>,
}

impl PreferenceProfile {
    pub fn new(candidates: CandidateSet, voters: Vec<Voter>) -> Result<Self> {
        if voters.is_empty() {
            return Err(Error::invalid("a profile needs at least one voter"));
        }
        let n = candidates.len();
        let mut ids = std::collections::HashSet::new();
        for v in &voters {
            if !ids.insert(v.id.as_str()) {
                return Err(Error::invalid(format!("duplicate voter id {:?}", v.id)));
            }
            match &v.ballot {
                Ballot::Ranked(r) => {
                    if r.len() != n {
                        return Err(Error::dims(n, r.len()));
                    }
                    if !r.is_strict() {
                        return Err(Error::TiesNotAllowed);
                    }
                }
                Ballot::Comparisons(cs) => {
                    let mut seen = std::collections::HashSet::new();
                    for c in cs {
                        if c.winner >= n || c.loser >= n || c.winner == c.loser {
                            return Err(Error::invalid(format!(
                                "voter {:?}: invalid comparison {c:?}",
                                v.id
                            )));
                        }
                        let key = (c.winner.min(c.loser), c.winner.max(c.loser));
                        if !seen.insert(key) {
                            return Err(Error::invalid(format!(
                                "voter {:?} compares pair {key:?} more than once",
                                v.id
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { candidates, voters })
    }

    /// Complete profile over `y1..yn` with voters `v1..vm`; each entry of
    /// `rankings` is a best-first permutation of `0..n`.
    pub fn from_rankings(n: usize, rankings: &[Vec<usize>]) -> Result<Self> {
        let voters = rankings
            .iter()
            .enumerate()
            .map(|(k, order)| {
                Ok(Voter {
                    id: format!("v{}", k + 1),
                    ballot: Ballot::Ranked(Ranking::strict(order.clone())?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(CandidateSet::numbered(n)?, voters)
    }

    /// Generalized profile over `y1..yn`, one voter per comparison set.
    pub fn from_comparisons(n: usize, sets: &[Vec<(usize, usize)>]) -> Result<Self> {
        let voters = sets
            .iter()
            .enumerate()
            .map(|(k, set)| Voter {
                id: format!("v{}", k + 1),
                ballot: Ballot::Comparisons(
                    set.iter().map(|&(w, l)| Comparison::new(w, l)).collect(),
                ),
            })
            .collect();
        Self::new(CandidateSet::numbered(n)?, voters)
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn n(&self) -> usize {
        self.candidates.len()
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn m(&self) -> usize {
        self.voters.len()
    }

    pub fn kind(&self) -> ProfileKind {
        if self
            .voters
            .iter()
            .all(|v| matches!(v.ballot, Ballot::Ranked(_)))
        {
            ProfileKind::Complete
        } else {
            ProfileKind::Generalized
        }
    }

    pub fn is_complete(&self) -> bool {
        self.kind() == ProfileKind::Complete
    }

    /// Voters' strict rankings; fails on generalized profiles.
    pub fn rankings(&self) -> Result<Vec<&Ranking>> {
        self.voters
            .iter()
            .map(|v| match &v.ballot {
                Ballot::Ranked(r) => Ok(r),
                Ballot::Comparisons(_) => Err(Error::NotCompleteProfile),
            })
            .collect()
    }

    /// The strict ranking of voter `k`, if it submitted one.
    pub fn ranking_of(&self, k: usize) -> Option<&Ranking> {
        match &self.voters()[k].ballot {
            Ballot::Ranked(r) => Some(r),
            Ballot::Comparisons(_) => None,
        }
    }

    /// Sub-profile made of the voters at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let voters = indices.iter().map(|&k| self.voters[k].clone()).collect();
        Self::new(self.candidates.clone(), voters)
    }

    /// Relabel candidates: candidate `i` becomes candidate `perm[i]` in every
    /// ballot. Labels and voter ids are kept.
    pub fn apply_permutation(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::dims(self.n(), perm.len()));
        }
        check_permutation(perm)?;
        let voters = self
            .voters
            .iter()
            .map(|v| Voter {
                id: v.id.clone(),
                ballot: v.ballot.permuted(perm),
            })
            .collect();
        Ok(Self {
            candidates: self.candidates.clone(),
            voters,
        })
    }

    /// Concatenate the voters of `other` (same candidates) after ours,
    /// renaming ids that would collide.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::dims(self.n(), other.n()));
        }
        let mut voters = self.voters.clone();
        for v in &other.voters {
            let mut id = v.id.clone();
            while voters.iter().any(|w| w.id == id) {
                id.push('\'');
            }
            voters.push(Voter {
                id,
                ballot: v.ballot.clone(),
            });
        }
        Self::new(self.candidates.clone(), voters)
    }
}

/// Whether two profiles hold the same multiset of ballots (voter ids ignored).
pub fn profiles_equal_as_multisets(a: &PreferenceProfile, b: &PreferenceProfile) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::dims(a.n(), b.n()));
    }
    if a.m() != b.m() {
        return Err(Error::dims(a.m(), b.m()));
    }
    let canon = |p: &PreferenceProfile| {
        let mut v: Vec<_> = p.voters.iter().map(|v| v.ballot.canonical()).collect();
        v.sort_unstable();
        v
    };
    Ok(canon(a) == canon(b))
}

/// A relabeling `perm` with `a.apply_permutation(perm) ≅ b`, if one exists.
/// Brute force over all `n!` permutations.
pub fn find_equivalence(
    a: &PreferenceProfile,
    b: &PreferenceProfile,
) -> Result<Option<Vec<usize>>> {
    if a.n() != b.n() {
        return Err(Error::dims(a.n(), b.n()));
    }
    if a.m() != b.m() {
        return Err(Error::dims(a.m(), b.m()));
    }
    for perm in all_rankings(a.n()) {
        if profiles_equal_as_multisets(&a.apply_permutation(&perm)?, b)? {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}

/// All relabelings that leave the profile unchanged as a multiset, in
/// lexicographic order.
pub fn automorphisms(profile: &PreferenceProfile) -> Vec<Vec<usize>> {
    all_rankings(profile.n())
        .into_iter()
        .filter(|perm| {
            let q = profile.apply_permutation(perm).expect("valid permutation");
            profiles_equal_as_multisets(profile, &q).expect("same dimensions")
        })
        .collect()
}

/// The transposition of `i` and `j` on `0..n`.
pub fn transposition(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(i, j);
    perm
}
