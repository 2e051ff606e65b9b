use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Ballot, CandidateSet, Comparison, PreferenceProfile, Voter};
use crate::error::{Error, Result};

/// How Assumption-1 tournaments are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Assumption1Model {
    /// Every pair oriented by a fair coin.
    RandomTournament,
    /// Pairs follow a uniformly random latent ranking, each flipped
    /// independently with probability `noise`.
    FromLatentRanking { noise: f64 },
}

/// Rng for draw `stream` under `seed`; streams are independent, so parallel
/// trials stay reproducible regardless of scheduling.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `m` independent uniformly random strict rankings over `n` candidates.
pub fn generate_complete(n: usize, m: usize, seed: u64) -> Result<PreferenceProfile> {
    let mut rng = seeded_rng(seed, 0);
    random_complete(n, m, &mut rng)
}

pub(crate) fn random_complete(n: usize, m: usize, rng: &mut impl Rng) -> Result<PreferenceProfile> {
    if m == 0 {
        return Err(Error::invalid("at least one voter is required"));
    }
    let rankings: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            order
        })
        .collect();
    PreferenceProfile::from_rankings(n, &rankings)
}

/// One comparison per unordered pair, each from its own labeler. Cycles are
/// allowed.
pub fn generate_assumption1(
    n: usize,
    seed: u64,
    model: Assumption1Model,
) -> Result<PreferenceProfile> {
    let mut rng = seeded_rng(seed, 0);
    random_assumption1(n, model, &mut rng)
}

pub(crate) fn random_assumption1(
    n: usize,
    model: Assumption1Model,
    rng: &mut impl Rng,
) -> Result<PreferenceProfile> {
    let pairs = pair_count(n);
    let bits = match model {
        Assumption1Model::RandomTournament => {
            (0..pairs).fold(0u64, |acc, k| acc | (u64::from(rng.gen::<bool>()) << k))
        }
        Assumption1Model::FromLatentRanking { noise } => {
            if !(0.0..=1.0).contains(&noise) {
                return Err(Error::invalid(format!("noise {noise} outside [0, 1]")));
            }
            let mut latent: Vec<usize> = (0..n).collect();
            latent.shuffle(rng);
            let mut pos = vec![0; n];
            for (k, &c) in latent.iter().enumerate() {
                pos[c] = k;
            }
            let mut bits = 0u64;
            for (k, (i, j)) in pairs_of(n).enumerate() {
                let i_first = (pos[i] < pos[j]) ^ rng.gen_bool(noise);
                bits |= u64::from(i_first) << k;
            }
            bits
        }
    };
    tournament_profile(n, bits)
}

/// Number of unordered pairs of `n` candidates.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Pairs `(i, j)` with `i < j` in lexicographic order.
pub fn pairs_of(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// The Assumption-1 profile whose k-th pair (lexicographic) is won by the
/// lower index iff bit k of `bits` is set. Pair k is judged by voter `v{k+1}`.
pub fn tournament_profile(n: usize, bits: u64) -> Result<PreferenceProfile> {
    if pair_count(n) > 64 {
        return Err(Error::invalid(
            "tournament too large for a 64-bit orientation",
        ));
    }
    let voters = pairs_of(n)
        .enumerate()
        .map(|(k, (i, j))| {
            let c = if bits >> k & 1 == 1 {
                Comparison::new(i, j)
            } else {
                Comparison::new(j, i)
            };
            Voter {
                id: format!("v{}", k + 1),
                ballot: Ballot::Comparisons(vec![c]),
            }
        })
        .collect();
    PreferenceProfile::new(CandidateSet::numbered(n)?, voters)
}

/// All `n!` permutations of `0..n` in lexicographic order.
pub fn all_rankings(n: usize) -> Vec<Vec<usize>> {
    let total: usize = (1..=n).product();
    (0..total).map(|k| permutation_from_index(n, k)).collect()
}

/// The `index`-th permutation of `0..n` in lexicographic order (Lehmer code).
pub fn permutation_from_index(n: usize, mut index: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut fact: usize = (1..n).product::<usize>().max(1);
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let q = index / fact;
        index %= fact;
        out.push(pool.remove(q));
        if k > 0 {
            fact /= k;
        }
    }
    out
}
