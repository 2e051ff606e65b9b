use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point on the probability simplex over the candidates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ResponseDistribution<S> {
    p: Vec<S>,
}

const SUM_TOL: f64 = 1e-12;

impl<S: Scalar> ResponseDistribution<S> {
    pub fn new(p: Vec<S>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("empty distribution"));
        }
        if let Some(i) = p.iter().position(Scalar::is_negative) {
            return Err(Error::invalid(format!("negative probability at {i}")));
        }
        let sum = p.iter().cloned().fold(S::zero(), |a, b| a + b);
        let gap = (sum - S::one())
            .to_f64()
            .map(f64::abs)
            .unwrap_or(f64::INFINITY);
        if gap > SUM_TOL {
            return Err(Error::invalid(format!("probabilities sum to 1{gap:+e}")));
        }
        Ok(Self { p })
    }

    /// Scale nonnegative masses so they sum to one.
    pub fn normalized(mass: Vec<S>) -> Result<Self> {
        let sum = mass.iter().cloned().fold(S::zero(), |a, b| a + b);
        if !sum.is_positive() {
            return Err(Error::invalid("total mass must be positive"));
        }
        Self::new(mass.into_iter().map(|x| x / sum.clone()).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            p: vec![S::ratio(1, n as u64); n],
        }
    }

    /// Block-size weighted average of distributions over the same candidates.
    pub fn mixture(parts: &[(u64, &ResponseDistribution<S>)]) -> Result<Self> {
        let n = parts.first().map(|(_, d)| d.len()).unwrap_or(0);
        let total: u64 = parts.iter().map(|(w, _)| w).sum();
        if n == 0 || total == 0 {
            return Err(Error::invalid("empty mixture"));
        }
        let mut acc = vec![S::zero(); n];
        for (w, d) in parts {
            if d.len() != n {
                return Err(Error::dims(n, d.len()));
            }
            let share = S::ratio(*w, total);
            for (a, x) in acc.iter_mut().zip(d.values()) {
                *a = a.clone() + share.clone() * x.clone();
            }
        }
        Self::new(acc)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn values(&self) -> &[S] {
        &self.p
    }

    pub fn get(&self, i: usize) -> &S {
        &self.p[i]
    }

    pub fn into_values(self) -> Vec<S> {
        self.p
    }

    pub fn to_f64(&self) -> ResponseDistribution<f64> {
        ResponseDistribution {
            p: self
                .p
                .iter()
                .map(|x| x.to_f64().unwrap_or(f64::NAN))
                .collect(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut p = self.p.clone();
        for (i, x) in self.p.iter().enumerate() {
            p[perm[i]] = x.clone();
        }
        Self { p }
    }
}

impl ResponseDistribution<f64> {
    /// `max_i |p_i - q_i|` with the index where it is attained.
    pub fn max_gap(&self, other: &Self) -> Result<(usize, f64)> {
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        Ok(self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, g)| if g > best.1 { (i, g) } else { best },
            ))
    }
}
