use crate::error::Result;
use crate::profile::PairwiseTally;
use crate::reward::{RewardVector, SolveStatus};

/// Outcome of trying to explain a tally by a single reward vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Embedding {
    /// Every proportion is interior. `rewards` are anchored on the first
    /// candidate and centered; `residual` is
    /// `max_{i,j} |log(P_ij / P_ji) − (r_i − r_j)|`.
    Interior { rewards: Vec<f64>, residual: f64 },
    /// Some pair was decided unanimously, so no finite reward fits it.
    Boundary { pair: (usize, usize) },
}

impl Embedding {
    pub fn residual(&self) -> Option<f64> {
        match self {
            Embedding::Interior { residual, .. } => Some(*residual),
            Embedding::Boundary { .. } => None,
        }
    }
}

pub fn embedding(tally: &PairwiseTally) -> Result<Embedding> {
    tally.require_complete()?;
    let n = tally.n();
    let w = tally.wins();
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] == 0 || w[j][i] == 0 {
                return Ok(Embedding::Boundary { pair: (i, j) });
            }
        }
    }
    // s_ij = log(P_ij / P_ji) = log(w_ij / w_ji); the pair total cancels.
    let s = |i: usize, j: usize| {
        if i == j {
            0.0
        } else {
            (w[i][j] as f64).ln() - (w[j][i] as f64).ln()
        }
    };
    let mut rewards: Vec<f64> = (0..n).map(|i| s(i, 0)).collect();
    let mean = rewards.iter().sum::<f64>() / n as f64;
    rewards.iter_mut().for_each(|r| *r -= mean);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            residual = residual.max((s(i, j) - (rewards[i] - rewards[j])).abs());
        }
    }
    Ok(Embedding::Interior { rewards, residual })
}

/// The reward vector reproducing every pairwise proportion under the BT
/// model within `tol` (in log-odds), if there is one. The status carries the
/// residual as its gradient norm.
pub fn bt_embeddable(tally: &PairwiseTally, tol: f64) -> Result<Option<RewardVector<f64>>> {
    Ok(match embedding(tally)? {
        Embedding::Interior { rewards, residual } if residual <= tol => Some(RewardVector {
            r: rewards,
            status: SolveStatus::Converged {
                grad_norm: residual,
                iterations: 0,
            },
        }),
        _ => None,
    })
}
