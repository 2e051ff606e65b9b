use std::collections::VecDeque;

use num_bigint::BigInt;
use serde::Serialize;

use super::{Comparison, PreferenceProfile};
use crate::error::{Error, Result};
use crate::scalar::{rational, Rational};

/// Pairwise win counts and exact win proportions.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseTally {
    wins: Vec<Vec<u64>>,
    totals: Vec<Vec<u64>>,
    props: Vec<Vec<Option<Rational>>>,
}

impl PairwiseTally {
    /// Count every comparison in the profile; rankings expand to all
    /// `C(n,2)` implied comparisons.
    pub fn from_profile(profile: &PreferenceProfile) -> Self {
        let n = profile.n();
        let mut wins = vec![vec![0u64; n]; n];
        for voter in profile.voters() {
            for c in voter.ballot.comparisons() {
                wins[c.winner][c.loser] += 1;
            }
        }
        Self::from_wins(wins).expect("tally of a valid profile")
    }

    /// Build directly from a win-count matrix (`wins[i][j]` = times i beat j).
    pub fn from_wins(wins: Vec<Vec<u64>>) -> Result<Self> {
        let n = wins.len();
        if n < 2 {
            return Err(Error::invalid("a tally needs at least two candidates"));
        }
        if let Some(row) = wins.iter().find(|row| row.len() != n) {
            return Err(Error::dims(n, row.len()));
        }
        if (0..n).any(|i| wins[i][i] != 0) {
            return Err(Error::invalid("diagonal win counts must be zero"));
        }
        let mut totals = vec![vec![0u64; n]; n];
        let mut props = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let t = wins[i][j] + wins[j][i];
                totals[i][j] = t;
                if t > 0 {
                    props[i][j] = Some(Rational::new(BigInt::from(wins[i][j]), BigInt::from(t)));
                }
            }
        }
        Ok(Self {
            wins,
            totals,
            props,
        })
    }

    pub fn n(&self) -> usize {
        self.wins.len()
    }

    pub fn wins(&self) -> &[Vec<u64>] {
        &self.wins
    }

    pub fn totals(&self) -> &[Vec<u64>] {
        &self.totals
    }

    /// `P(y_i ≻ y_j)`, or `None` when the pair was never compared.
    pub fn prop_opt(&self, i: usize, j: usize) -> Option<&Rational> {
        self.props[i][j].as_ref()
    }

    pub fn prop(&self, i: usize, j: usize) -> Result<&Rational> {
        self.prop_opt(i, j).ok_or(Error::UndefinedPair(i, j))
    }

    /// First uncompared pair, if any.
    pub fn undefined_pair(&self) -> Option<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.totals[i][j] == 0)
    }

    pub fn require_complete(&self) -> Result<()> {
        match self.undefined_pair() {
            Some((i, j)) => Err(Error::UndefinedPair(i, j)),
            None => Ok(()),
        }
    }

    /// The common pair total, if every pair was compared equally often.
    pub fn constant_total(&self) -> Option<u64> {
        let n = self.n();
        let t = self.totals[0][1];
        let equal = (0..n).all(|i| (0..n).all(|j| i == j || self.totals[i][j] == t));
        (equal && t > 0).then_some(t)
    }

    /// Relabel candidates: row/column `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let mut wins = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in 0..n {
                wins[perm[i]][perm[j]] = self.wins[i][j];
            }
        }
        Self::from_wins(wins).expect("permuted tally")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Win,
    Lose,
    Tie,
}

/// Pairwise majority relation; `None` marks a pair nobody compared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorityRelation {
    cells: Vec<Vec<Option<Outcome>>>,
}

impl MajorityRelation {
    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn outcome(&self, i: usize, j: usize) -> Result<Outcome> {
        self.cells[i][j].ok_or(Error::UndefinedPair(i, j))
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.cells[i][j] == Some(Outcome::Win)
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.cells[i][j].is_some()))
    }

    pub fn has_ties(&self) -> bool {
        self.cells
            .iter()
            .flatten()
            .any(|c| *c == Some(Outcome::Tie))
    }

    /// Build a relation from a "beats" predicate; pairs where neither side
    /// beats the other are ties.
    pub fn from_beats(n: usize, beats: impl Fn(usize, usize) -> bool) -> Self {
        let mut cells = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cells[i][j] = Some(if beats(i, j) {
                        Outcome::Win
                    } else if beats(j, i) {
                        Outcome::Lose
                    } else {
                        Outcome::Tie
                    });
                }
            }
        }
        Self { cells }
    }

    /// Topological order of the Win digraph when the relation is a strict
    /// linear order (complete, tie-free, acyclic).
    pub fn linear_order(&self) -> Option<Vec<usize>> {
        if !self.is_complete() || self.has_ties() {
            return None;
        }
        let n = self.n();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.beats(i, j))
            .collect();
        topological_order(n, &edges)
    }
}

/// `Win` iff `P(y_i ≻ y_j) > 1/2`, `Tie` iff exactly `1/2`.
pub fn majority_relation(tally: &PairwiseTally) -> MajorityRelation {
    let n = tally.n();
    let half = rational(1, 2);
    let mut cells = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(p) = tally.prop_opt(i, j) {
                cells[i][j] = Some(match p.cmp(&half) {
                    std::cmp::Ordering::Greater => Outcome::Win,
                    std::cmp::Ordering::Less => Outcome::Lose,
                    std::cmp::Ordering::Equal => Outcome::Tie,
                });
            }
        }
    }
    MajorityRelation { cells }
}

/// Shortest directed cycle in the Win digraph, starting at its smallest
/// member, or `None` if the majority relation is acyclic.
pub fn has_condorcet_cycle(relation: &MajorityRelation) -> Result<Option<Vec<usize>>> {
    let n = relation.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && relation.cells[i][j].is_none() {
                return Err(Error::IncompleteRelation(i, j));
            }
        }
    }
    let mut best: Option<Vec<usize>> = None;
    for start in 0..n {
        if let Some(cycle) = shortest_cycle_through(relation, start) {
            if best.as_ref().map_or(true, |b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    Ok(best)
}

fn shortest_cycle_through(relation: &MajorityRelation, start: usize) -> Option<Vec<usize>> {
    let n = relation.n();
    let mut parent = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    visited[start] = true;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if u == v || !relation.beats(u, v) {
                continue;
            }
            if v == start {
                let mut cycle = vec![u];
                let mut cur = u;
                while cur != start {
                    cur = parent[cur];
                    cycle.push(cur);
                }
                cycle.reverse();
                return Some(cycle);
            }
            if !visited[v] {
                visited[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Whether a voter's comparison digraph is acyclic.
pub fn is_transitive(comparisons: &[Comparison]) -> bool {
    let n = comparisons
        .iter()
        .map(|c| c.winner.max(c.loser) + 1)
        .max()
        .unwrap_or(0);
    let edges: Vec<(usize, usize)> = comparisons.iter().map(|c| (c.winner, c.loser)).collect();
    topological_order(n, &edges).is_some()
}

/// Kahn's algorithm, smallest available vertex first.
pub(crate) fn topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        out[a].push(b);
        indegree[b] += 1;
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.insert(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_voter, paradox};
    use crate::profile::generate::{all_rankings, tournament_profile};

    /// Count comparisons by walking every pair of positions in every ballot.
    fn hand_count(rankings: &[Vec<usize>], n: usize) -> Vec<Vec<u64>> {
        let mut w = vec![vec![0; n]; n];
        for r in rankings {
            for a in 0..n {
                for b in 0..n {
                    let pa = r.iter().position(|&c| c == a).unwrap();
                    let pb = r.iter().position(|&c| c == b).unwrap();
                    if pa < pb {
                        w[a][b] += 1;
                    }
                }
            }
        }
        w
    }

    #[test]
    fn paradox_props_are_two_thirds() {
        let t = PairwiseTally::from_profile(&paradox());
        assert_eq!(t.prop(0, 1).unwrap(), &rational(2, 3));
        assert_eq!(t.prop(1, 2).unwrap(), &rational(2, 3));
        assert_eq!(t.prop(2, 0).unwrap(), &rational(2, 3));
        assert_eq!(t.constant_total(), Some(3));
    }

    #[test]
    fn single_comparison_tally() {
        let p = PreferenceProfile::from_rankings(2, &[vec![0, 1]]).unwrap();
        let t = PairwiseTally::from_profile(&p);
        assert_eq!(t.wins()[0][1], 1);
        assert_eq!(t.prop(0, 1).unwrap(), &rational(1, 1));
    }

    #[test]
    fn four_voter_tally_matches_hand_count() {
        let rankings = vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let t = PairwiseTally::from_profile(&four_voter());
        assert_eq!(t.wins(), hand_count(&rankings, 3).as_slice());
        assert_eq!(t.prop(0, 1).unwrap(), &rational(3, 4));
        assert_eq!(t.prop(1, 2).unwrap(), &rational(3, 4));
        assert_eq!(t.prop(0, 2).unwrap(), &rational(1, 2));
    }

    #[test]
    fn undefined_pairs_are_flagged() {
        let p = PreferenceProfile::from_comparisons(3, &[vec![(0, 1)]]).unwrap();
        let t = PairwiseTally::from_profile(&p);
        assert!(t.prop(0, 2).is_err());
        assert_eq!(t.undefined_pair(), Some((0, 2)));
        let rel = majority_relation(&t);
        assert_eq!(rel.outcome(0, 1).unwrap(), Outcome::Win);
        assert_eq!(rel.outcome(1, 2), Err(Error::UndefinedPair(1, 2)));
        assert_eq!(
            has_condorcet_cycle(&rel),
            Err(Error::IncompleteRelation(0, 2))
        );
    }

    #[test]
    fn paradox_relation_is_a_cycle() {
        let rel = majority_relation(&PairwiseTally::from_profile(&paradox()));
        assert!(rel.beats(0, 1) && rel.beats(1, 2) && rel.beats(2, 0));
        assert_eq!(has_condorcet_cycle(&rel).unwrap(), Some(vec![0, 1, 2]));
        assert_eq!(rel.linear_order(), None);
    }

    #[test]
    fn half_is_a_tie() {
        let p = PreferenceProfile::from_rankings(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        let rel = majority_relation(&PairwiseTally::from_profile(&p));
        assert_eq!(rel.outcome(0, 1).unwrap(), Outcome::Tie);
        assert_eq!(has_condorcet_cycle(&rel).unwrap(), None);

        let rel = majority_relation(&PairwiseTally::from_profile(&four_voter()));
        assert!(rel.beats(0, 1) && rel.beats(1, 2));
        assert_eq!(rel.outcome(0, 2).unwrap(), Outcome::Tie);
    }

    /// Cycle detection by exhaustive DFS over simple paths.
    fn dfs_has_cycle(rel: &MajorityRelation) -> bool {
        fn go(rel: &MajorityRelation, start: usize, u: usize, seen: &mut Vec<bool>) -> bool {
            for v in 0..rel.n() {
                if u != v && rel.beats(u, v) {
                    if v == start {
                        return true;
                    }
                    if !seen[v] {
                        seen[v] = true;
                        if go(rel, start, v, seen) {
                            return true;
                        }
                        seen[v] = false;
                    }
                }
            }
            false
        }
        (0..rel.n()).any(|s| {
            let mut seen = vec![false; rel.n()];
            seen[s] = true;
            go(rel, s, s, &mut seen)
        })
    }

    #[test]
    fn tournaments_on_four_agree_with_dfs() {
        for bits in 0..64u64 {
            let t = PairwiseTally::from_profile(&tournament_profile(4, bits).unwrap());
            let rel = majority_relation(&t);
            let cycle = has_condorcet_cycle(&rel).unwrap();
            assert_eq!(cycle.is_some(), dfs_has_cycle(&rel), "bits {bits}");
            if let Some(c) = cycle {
                assert_eq!(c.len(), 3, "tournament cycles contain a triangle");
                assert!(rel.beats(c[2], c[0]));
            }
            assert_eq!(rel.linear_order().is_some(), cycle_free(&rel));
        }
    }

    fn cycle_free(rel: &MajorityRelation) -> bool {
        !dfs_has_cycle(rel)
    }

    #[test]
    fn transitivity() {
        let c = |w, l| Comparison::new(w, l);
        assert!(!is_transitive(&[c(0, 1), c(1, 2), c(2, 0)]));
        assert!(is_transitive(&[c(3, 1)]));
        for r in all_rankings(4) {
            let r = super::super::Ranking::strict(r).unwrap();
            assert!(is_transitive(&r.comparisons()));
        }
    }

    #[test]
    fn linear_majority_has_no_cycle_small_exhaustive() {
        // n ≤ 4, m ≤ 3: a strict linear majority order never has a cycle.
        for n in 2..=4usize {
            let perms = all_rankings(n);
            for m in 1..=3u32 {
                let total = perms.len().pow(m);
                for idx in 0..total {
                    let mut k = idx;
                    let rankings: Vec<Vec<usize>> = (0..m)
                        .map(|_| {
                            let r = perms[k % perms.len()].clone();
                            k /= perms.len();
                            r
                        })
                        .collect();
                    let p = PreferenceProfile::from_rankings(n, &rankings).unwrap();
                    let t = PairwiseTally::from_profile(&p);
                    assert_eq!(t.constant_total(), Some(m as u64));
                    let rel = majority_relation(&t);
                    if rel.linear_order().is_some() {
                        assert_eq!(has_condorcet_cycle(&rel).unwrap(), None);
                    }
                }
            }
        }
    }
}
