use super::WeightMatrix;
use crate::error::{Error, Result};
use crate::scalar::{log_sigmoid, sigmoid, Real, Scalar};

/// Dense float copy of the weights plus an optional ridge term `λ Σ r²`.
pub(crate) struct Objective<F> {
    pub w: Vec<Vec<F>>,
    pub lambda: F,
}

impl<F: Real> Objective<F> {
    pub fn new<S: Scalar>(weights: &WeightMatrix<S>, lambda: F) -> Self {
        Self {
            w: weights.to_real(),
            lambda,
        }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn value(&self, r: &[F]) -> F {
        let n = self.n();
        let mut total = F::zero();
        for i in 0..n {
            for j in i + 1..n {
                let d = r[i] - r[j];
                total = total - self.w[i][j] * log_sigmoid(d) - self.w[j][i] * log_sigmoid(-d);
            }
        }
        total + self.lambda * r.iter().fold(F::zero(), |a, &x| a + x * x)
    }

    /// `∂L/∂r_k = −Σ_{j≠k} [w_kj − (w_kj + w_jk) σ(r_k − r_j)] + 2λ r_k`.
    pub fn gradient(&self, r: &[F]) -> Vec<F> {
        let n = self.n();
        let two = F::lit(2.0);
        (0..n)
            .map(|k| {
                let mut g = two * self.lambda * r[k];
                for j in (0..n).filter(|&j| j != k) {
                    let t = self.w[k][j] + self.w[j][k];
                    g = g - (self.w[k][j] - t * sigmoid(r[k] - r[j]));
                }
                g
            })
            .collect()
    }

    pub fn hessian(&self, r: &[F]) -> Vec<Vec<F>> {
        let n = self.n();
        let mut h = vec![vec![F::zero(); n]; n];
        for k in 0..n {
            h[k][k] = F::lit(2.0) * self.lambda;
            for j in (0..n).filter(|&j| j != k) {
                let t = self.w[k][j] + self.w[j][k];
                let s = sigmoid(r[k] - r[j]);
                let c = t * s * (F::one() - s);
                h[k][k] = h[k][k] + c;
                h[k][j] = h[k][j] - c;
            }
        }
        h
    }
}

fn check_dims<S: Scalar, F>(weights: &WeightMatrix<S>, r: &[F]) -> Result<()> {
    if r.len() != weights.n() {
        return Err(Error::dims(weights.n(), r.len()));
    }
    Ok(())
}

/// `−Σ_{i<j} [w_ij log σ(r_i − r_j) + w_ji log σ(r_j − r_i)]`.
pub fn loss<S: Scalar, F: Real>(weights: &WeightMatrix<S>, r: &[F]) -> Result<F> {
    check_dims(weights, r)?;
    Ok(Objective::new(weights, F::zero()).value(r))
}

/// Loss plus the ridge term `λ Σ r_k²`.
pub fn regularized_loss<S: Scalar, F: Real>(
    weights: &WeightMatrix<S>,
    r: &[F],
    lambda: F,
) -> Result<F> {
    check_dims(weights, r)?;
    Ok(Objective::new(weights, lambda).value(r))
}

pub fn gradient<S: Scalar, F: Real>(weights: &WeightMatrix<S>, r: &[F]) -> Result<Vec<F>> {
    check_dims(weights, r)?;
    Ok(Objective::new(weights, F::zero()).gradient(r))
}

pub fn hessian<S: Scalar, F: Real>(weights: &WeightMatrix<S>, r: &[F]) -> Result<Vec<Vec<F>>> {
    check_dims(weights, r)?;
    Ok(Objective::new(weights, F::zero()).hessian(r))
}
