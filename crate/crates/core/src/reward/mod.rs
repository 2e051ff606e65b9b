//! The weighted Bradley–Terry reward objective
//!
//! ```text
//! L(r) = −Σ_{i<j} [ w_ij · log σ(r_i − r_j) + w_ji · log σ(r_j − r_i) ]
//! ```
//!
//! Different weightings recover different aggregation rules: raw win counts
//! give Borda, majority indicators give Copeland, and `p_i / (p_i + p_j)`
//! targets a given distribution. When every pair total `w_ij + w_ji` equals
//! the same constant `𝚖`, the MLE orders candidates exactly like the score
//! `m_k = Σ_j w_kj / 𝚖`, so [`rank_by_scores`] yields the induced ranking
//! without solving (and even when the minimizer sits at infinity).

mod objective;
mod solver;

use crate::distribution::ResponseDistribution;
use crate::error::{Error, Result};
use crate::profile::{PairwiseTally, Ranking};
use crate::rules::{
    majority_cmp, ranking_from_scores, RankTiePolicy, ScoreRule, ScoreVector, TiePolicy,
};
use crate::scalar::{Real, Scalar};

pub use objective::{gradient, hessian, loss, regularized_loss};
pub use solver::{solve_mle, RewardVector, SolveMethod, SolveStatus, SolverConfig};

/// Nonnegative loss weights with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix<S> {
    w: Vec<Vec<S>>,
    pair_total: Option<S>,
}

impl<S: Scalar> WeightMatrix<S> {
    pub fn new(w: Vec<Vec<S>>) -> Result<Self> {
        let n = w.len();
        if n < 2 {
            return Err(Error::invalid("weights need at least two candidates"));
        }
        for (i, row) in w.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dims(n, row.len()));
            }
            if !row[i].is_zero() {
                return Err(Error::invalid("diagonal weights must be zero"));
            }
            if let Some(j) = row.iter().position(Scalar::is_negative) {
                return Err(Error::invalid(format!("negative weight at ({i}, {j})")));
            }
        }
        let total = w[0][1].clone() + w[1][0].clone();
        let constant = total.is_positive()
            && (0..n).all(|i| (i + 1..n).all(|j| w[i][j].clone() + w[j][i].clone() == total));
        Ok(Self {
            w,
            pair_total: constant.then_some(total),
        })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.w[i][j]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.w
    }

    /// The constant `𝚖 = w_ij + w_ji`, or `None` in unconstrained mode.
    pub fn pair_total(&self) -> Option<&S> {
        self.pair_total.as_ref()
    }

    pub fn is_constant_total(&self) -> bool {
        self.pair_total.is_some()
    }

    pub fn to_real<F: Real>(&self) -> Vec<Vec<F>> {
        self.w
            .iter()
            .map(|row| row.iter().map(|x| x.to_real()).collect())
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<WeightMatrix<T>> {
        WeightMatrix::new(
            self.w
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        )
    }
}

/// Raw win counts: `w_ij = #(y_i ≻ y_j)`. Unequal pair totals are not an
/// error; the result is then in unconstrained mode.
pub fn weights_standard<S: Scalar>(tally: &PairwiseTally) -> WeightMatrix<S> {
    WeightMatrix::new(
        tally
            .wins()
            .iter()
            .map(|row| row.iter().map(|&c| S::from_count(c)).collect())
            .collect(),
    )
    .expect("win counts form a valid weight matrix")
}

/// Majority indicators `w_ij = 1[P(y_i ≻ y_j) > 1/2]`; a tie gives `1/2`
/// each under [`TiePolicy::HalfPoint`] and nothing under `StrictOnly`.
pub fn weights_copeland<S: Scalar>(
    tally: &PairwiseTally,
    ties: TiePolicy,
) -> Result<WeightMatrix<S>> {
    tally.require_complete()?;
    let n = tally.n();
    let half = S::ratio(1, 2);
    let w = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return S::zero();
                    }
                    match majority_cmp(tally, i, j) {
                        std::cmp::Ordering::Greater => S::one(),
                        std::cmp::Ordering::Equal if ties == TiePolicy::HalfPoint => half.clone(),
                        _ => S::zero(),
                    }
                })
                .collect()
        })
        .collect();
    WeightMatrix::new(w)
}

/// `w_ij = p_i / (p_i + p_j)`, whose MLE is `r = log p + const`.
pub fn weights_gpm<S: Scalar>(target: &ResponseDistribution<S>) -> Result<WeightMatrix<S>> {
    let p = target.values();
    if let Some(i) = p.iter().position(|x| !x.is_positive()) {
        return Err(Error::ZeroProbability(i));
    }
    let n = p.len();
    let w = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        S::zero()
                    } else {
                        p[i].clone() / (p[i].clone() + p[j].clone())
                    }
                })
                .collect()
        })
        .collect();
    WeightMatrix::new(w)
}

/// `m_k = Σ_{j≠k} w_kj / 𝚖`.
pub fn scores<S: Scalar>(weights: &WeightMatrix<S>) -> Result<ScoreVector<S>> {
    let total = weights.pair_total().ok_or(Error::NotConstantTotal)?;
    let values = weights
        .rows()
        .iter()
        .map(|row| row.iter().cloned().fold(S::zero(), |a, b| a + b) / total.clone())
        .collect();
    Ok(ScoreVector {
        values,
        rule: ScoreRule::GeneralScore,
    })
}

/// The ranking the (possibly infinite) MLE induces, computed exactly from
/// the scores.
pub fn rank_by_scores<S: Scalar>(
    weights: &WeightMatrix<S>,
    policy: RankTiePolicy,
) -> Result<Ranking> {
    Ok(ranking_from_scores(&scores(weights)?.values, policy))
}

/// `p_i = exp(r_i) / Σ_k exp(r_k)` for a converged reward vector.
pub fn softmax<F: Real>(rewards: &RewardVector<F>) -> Result<ResponseDistribution<F>> {
    if !rewards.is_converged() {
        return Err(Error::NotConverged);
    }
    Ok(softmax_values(&rewards.r))
}

/// Softmax of raw values, shifted by the maximum before exponentiating.
pub fn softmax_values<F: Real>(r: &[F]) -> ResponseDistribution<F> {
    let max = r.iter().copied().fold(F::neg_infinity(), F::max);
    let e: Vec<F> = r.iter().map(|&x| (x - max).exp()).collect();
    let sum = e.iter().copied().fold(F::zero(), |a, b| a + b);
    let mut p: Vec<F> = e.into_iter().map(|x| x / sum).collect();
    // Absorb rounding so the simplex check holds to machine precision.
    let drift = p.iter().copied().fold(F::zero(), |a, b| a + b) - F::one();
    if let Some(top) = p.iter_mut().max_by(|a, b| a.partial_cmp(b).unwrap()) {
        *top = *top - drift;
    }
    ResponseDistribution::new(p).expect("softmax lies on the simplex")
}
