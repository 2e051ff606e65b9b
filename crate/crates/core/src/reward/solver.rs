use serde::Serialize;

use super::objective::Objective;
use super::WeightMatrix;
use crate::error::{Error, Result};
use crate::profile::Ranking;
use crate::scalar::{Real, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Newton on the `n − 1` coordinates of the `Σ r = 0` subspace.
    #[default]
    NewtonReduced,
    GradientDescentLineSearch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<F> {
    /// Stop once the gradient of the normalized loss (weights divided by the
    /// largest pair total) has Euclidean norm at most this.
    pub grad_tol: F,
    pub max_iters: usize,
    /// A drifting solve is reported as diverged once some `|r_i|` exceeds this.
    pub divergence_radius: F,
    pub method: SolveMethod,
    /// Opt-in ridge term `λ Σ r_k²`; zero by default.
    pub regularization: F,
}

impl<F: Real> Default for SolverConfig<F> {
    fn default() -> Self {
        Self {
            grad_tol: F::lit(1e-10),
            max_iters: 10_000,
            divergence_radius: F::lit(30.0),
            method: SolveMethod::NewtonReduced,
            regularization: F::zero(),
        }
    }
}

impl<F: Real> SolverConfig<F> {
    pub fn with_method(mut self, method: SolveMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_regularization(mut self, lambda: F) -> Self {
        self.regularization = lambda;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > F::zero()) {
            return Err(Error::invalid("grad_tol must be positive"));
        }
        if !(self.divergence_radius > F::zero()) {
            return Err(Error::invalid("divergence_radius must be positive"));
        }
        if self.regularization < F::zero() || !self.regularization.is_finite() {
            return Err(Error::invalid(
                "regularization must be a finite nonnegative number",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SolveStatus<F> {
    Converged {
        grad_norm: F,
        iterations: usize,
    },
    /// No finite minimizer. `rising` candidates head to `+∞` and `falling`
    /// ones to `−∞` relative to the rest.
    Diverged {
        rising: Vec<usize>,
        falling: Vec<usize>,
        iterations: usize,
    },
    MaxIters {
        grad_norm: F,
        iterations: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewardVector<F> {
    /// Rewards with `Σ r = 0`.
    pub r: Vec<F>,
    pub status: SolveStatus<F>,
}

impl<F: Real> RewardVector<F> {
    pub fn is_converged(&self) -> bool {
        matches!(self.status, SolveStatus::Converged { .. })
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self.status, SolveStatus::Diverged { .. })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Best first; candidates whose sorted rewards are chained by gaps of at
    /// most `tol` share a tier.
    pub fn ranking(&self, tol: F) -> Ranking {
        let mut idx: Vec<usize> = (0..self.r.len()).collect();
        idx.sort_by(|&a, &b| self.r[b].partial_cmp(&self.r[a]).unwrap().then(a.cmp(&b)));
        let mut tiers: Vec<Vec<usize>> = Vec::new();
        for (k, &c) in idx.iter().enumerate() {
            match tiers.last_mut() {
                Some(tier) if self.r[idx[k - 1]] - self.r[c] <= tol => tier.push(c),
                _ => tiers.push(vec![c]),
            }
        }
        Ranking::from_tiers(tiers).expect("tiers partition the candidates")
    }
}

/// Strongly connected components of the "beats" digraph (edge `i → j` when
/// `w_ij > 0`), numbered in topological order of the condensation.
fn components<F: Real>(w: &[Vec<F>]) -> (Vec<usize>, usize) {
    let n = w.len();
    let reach = |from: usize, forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward { w[u][v] } else { w[v][u] };
                if !seen[v] && edge > F::zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd: Vec<Vec<bool>> = (0..n).map(|i| reach(i, true)).collect();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for i in 0..n {
        if comp[i] == usize::MAX {
            for j in 0..n {
                if fwd[i][j] && fwd[j][i] {
                    comp[j] = count;
                }
            }
            count += 1;
        }
    }
    // Order components by how many others reach them: sources first.
    let mut reached_by = vec![0usize; count];
    for c in 0..count {
        let rep = comp.iter().position(|&x| x == c).unwrap();
        reached_by[c] = (0..count)
            .filter(|&d| {
                d != c && {
                    let r = comp.iter().position(|&x| x == d).unwrap();
                    fwd[r][rep]
                }
            })
            .count();
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&c| (reached_by[c], c));
    let mut rank = vec![0; count];
    for (k, &c) in order.iter().enumerate() {
        rank[c] = k;
    }
    (comp.into_iter().map(|c| rank[c]).collect(), count)
}

fn is_connected<F: Real>(w: &[Vec<F>]) -> bool {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if !seen[v] && w[u][v] + w[v][u] > F::zero() {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

struct Drift {
    rising: Vec<usize>,
    falling: Vec<usize>,
    /// Direction along which the loss strictly decreases: component level,
    /// centered.
    direction: Vec<f64>,
}

fn drift<F: Real>(w: &[Vec<F>]) -> Option<Drift> {
    let n = w.len();
    let (comp, count) = components(w);
    if count == 1 {
        return None;
    }
    let has_edge = |a: usize, b: usize| {
        (0..n).any(|i| comp[i] == a && (0..n).any(|j| comp[j] == b && w[i][j] > F::zero()))
    };
    let source = |c: usize| (0..count).all(|d| d == c || !has_edge(d, c));
    let sink = |c: usize| (0..count).all(|d| d == c || !has_edge(c, d));
    let rising = (0..n).filter(|&i| source(comp[i])).collect();
    let falling = (0..n).filter(|&i| sink(comp[i])).collect();
    let levels: Vec<f64> = comp.iter().map(|&c| (count - 1 - c) as f64).collect();
    let mean = levels.iter().sum::<f64>() / n as f64;
    Some(Drift {
        rising,
        falling,
        direction: levels.into_iter().map(|l| l - mean).collect(),
    })
}

fn norm<F: Real>(v: &[F]) -> F {
    v.iter().fold(F::zero(), |a, &x| a + x * x).sqrt()
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |s, (&x, &y)| s + x * y)
}

/// Solves `A x = b` for symmetric `A`; `None` unless positive definite.
fn cholesky_solve<F: Real>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = b.len();
    let mut l = vec![vec![F::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > F::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![F::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Projection of `g` onto the reduced coordinates `z`, where `r = [z; −Σz]`.
fn reduce<F: Real>(g: &[F]) -> Vec<F> {
    let n = g.len();
    g[..n - 1].iter().map(|&x| x - g[n - 1]).collect()
}

fn expand<F: Real>(z: &[F]) -> Vec<F> {
    let mut r = z.to_vec();
    r.push(-z.iter().fold(F::zero(), |a, &x| a + x));
    r
}

fn reduced_hessian<F: Real>(h: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = h.len();
    let last = n - 1;
    (0..last)
        .map(|i| {
            (0..last)
                .map(|j| h[i][j] - h[i][last] - h[last][j] + h[last][last])
                .collect()
        })
        .collect()
}

fn recenter<F: Real>(r: &mut [F]) {
    let mean = r.iter().fold(F::zero(), |a, &x| a + x) / F::from_count(r.len() as u64);
    for x in r.iter_mut() {
        *x = *x - mean;
    }
}

/// Maximum-likelihood rewards for the weighted loss (plus the ridge term
/// when `config.regularization > 0`).
///
/// Whether a finite minimizer exists is decided from the weights: without
/// regularization it exists iff every candidate reaches every other through
/// positive weights. Otherwise the solver follows the descent until some
/// reward leaves `divergence_radius` and reports the drifting candidates.
pub fn solve_mle<S: Scalar, F: Real>(
    weights: &WeightMatrix<S>,
    config: &SolverConfig<F>,
) -> Result<RewardVector<F>> {
    config.validate()?;
    let raw: Vec<Vec<F>> = weights.to_real();
    if !is_connected(&raw) {
        return Err(Error::DisconnectedGraph);
    }
    let n = raw.len();
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(F::zero(), |m, (i, j)| m.max(raw[i][j] + raw[j][i]));
    let obj = Objective {
        w: raw
            .iter()
            .map(|row| row.iter().map(|&x| x / scale).collect())
            .collect(),
        lambda: config.regularization / scale,
    };
    let drift = if config.regularization > F::zero() {
        None
    } else {
        drift(&obj.w)
    };

    let mut r = vec![F::zero(); n];
    let mut f = obj.value(&r);
    let mut iterations = 0;
    let mut grad_norm = norm(&obj.gradient(&r));
    let status = loop {
        if let Some(d) = &drift {
            let radius = r.iter().fold(F::zero(), |m, &x| m.max(x.abs()));
            if radius > config.divergence_radius {
                break SolveStatus::Diverged {
                    rising: d.rising.clone(),
                    falling: d.falling.clone(),
                    iterations,
                };
            }
        } else if grad_norm <= config.grad_tol {
            break SolveStatus::Converged {
                grad_norm,
                iterations,
            };
        }
        if iterations >= config.max_iters {
            break SolveStatus::MaxIters {
                grad_norm,
                iterations,
            };
        }
        iterations += 1;

        let g = obj.gradient(&r);
        if let (Some(d), true) = (&drift, grad_norm <= config.grad_tol) {
            // The finite part has settled; only the escape direction remains.
            for (x, &dx) in r.iter_mut().zip(&d.direction) {
                *x = *x + F::lit(dx);
            }
            f = obj.value(&r);
            grad_norm = norm(&obj.gradient(&r));
            continue;
        }
        let gz = reduce(&g);
        let newton = match config.method {
            SolveMethod::NewtonReduced => {
                let hz = reduced_hessian(&obj.hessian(&r));
                cholesky_solve(&hz, &gz).map(|x| x.into_iter().map(|v| -v).collect::<Vec<F>>())
            }
            SolveMethod::GradientDescentLineSearch => None,
        };
        let gd_step = || -> Vec<F> { gz.iter().map(|&v| -v).collect() };
        let step = match line_search(
            &obj,
            &r,
            f,
            &g,
            &expand(&newton.clone().unwrap_or_else(gd_step)),
        ) {
            Some(s) => Some(s),
            None if newton.is_some() => line_search(&obj, &r, f, &g, &expand(&gd_step())),
            None => None,
        };
        match (step, &drift) {
            (Some((next, fnext)), _) => {
                r = next;
                f = fnext;
            }
            (None, Some(d)) => {
                // Descent has stalled in floating point; push along the
                // known escape direction, on which the loss only decreases.
                for (x, &dx) in r.iter_mut().zip(&d.direction) {
                    *x = *x + F::lit(dx);
                }
                f = obj.value(&r);
            }
            (None, None) => {
                grad_norm = norm(&g);
                break SolveStatus::MaxIters {
                    grad_norm,
                    iterations,
                };
            }
        }
        grad_norm = norm(&obj.gradient(&r));
    };
    recenter(&mut r);
    Ok(RewardVector { r, status })
}

/// Backtracking along `dir`. Accepts the Armijo condition, or, once the loss
/// change is lost in rounding, a step that does not raise the loss but
/// shrinks the gradient.
fn line_search<F: Real>(
    obj: &Objective<F>,
    r: &[F],
    f: F,
    g: &[F],
    dir: &[F],
) -> Option<(Vec<F>, F)> {
    let slope = dot(g, dir);
    if !(slope < F::zero()) {
        return None;
    }
    let c = F::lit(1e-4);
    let noise = F::lit(1e-13) * (F::one() + f.abs());
    let gnorm = norm(g);
    let mut t = F::one();
    for _ in 0..60 {
        let next: Vec<F> = r.iter().zip(dir).map(|(&x, &d)| x + t * d).collect();
        let fnext = obj.value(&next);
        if fnext.is_finite() {
            if fnext <= f + c * t * slope {
                return Some((next, fnext));
            }
            if fnext <= f + noise && norm(&obj.gradient(&next)) < gnorm {
                return Some((next, fnext));
            }
        }
        t = t * F::lit(0.5);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_voter, paradox, single_voter_cycle};
    use crate::profile::PairwiseTally;
    use crate::reward::{gradient, loss, weights_copeland, weights_gpm, weights_standard};
    use crate::rules::TiePolicy;
    use crate::scalar::{rational, sigmoid, Rational};
    use crate::ResponseDistribution;

    fn solve(w: &WeightMatrix<Rational>) -> RewardVector<f64> {
        solve_mle(w, &SolverConfig::default()).unwrap()
    }

    fn std_weights(p: &crate::PreferenceProfile) -> WeightMatrix<Rational> {
        weights_standard(&PairwiseTally::from_profile(p))
    }

    #[test]
    fn paradox_rewards_are_zero() {
        let out = solve(&std_weights(&paradox()));
        assert!(out.is_converged());
        assert!(out.r.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn single_voter_cycle_gets_equal_rewards() {
        let out = solve(&std_weights(&single_voter_cycle()));
        assert!(out.is_converged());
        assert!(out.r.iter().all(|x| x.abs() < 1e-10), "{:?}", out.r);
    }

    #[test]
    fn four_voter_fixed_point() {
        // r = (s, 0, −s) with σ(s) + σ(2s) = 5/4.
        let out = solve(&std_weights(&four_voter()));
        assert!(out.is_converged());
        let s = 0.343_006_405_534_272_03;
        for (got, want) in out.r.iter().zip([s, 0.0, -s]) {
            assert!((got - want).abs() < 1e-9, "{:?}", out.r);
        }
        assert!((sigmoid(s) + sigmoid(2.0 * s) - 1.25f64).abs() < 1e-12);
        let m = [1.25, 1.0, 0.75];
        for k in 0..3 {
            let fixed: f64 = (0..3)
                .filter(|&j| j != k)
                .map(|j| sigmoid(out.r[k] - out.r[j]))
                .sum();
            assert!((m[k] - fixed).abs() <= 1e-9);
        }
        assert!(out.r.iter().sum::<f64>().abs() <= 1e-12);
    }

    #[test]
    fn strict_majority_copeland_diverges() {
        let t = PairwiseTally::from_profile(&four_voter());
        let w = weights_copeland::<Rational>(&t, TiePolicy::HalfPoint).unwrap();
        // Half points on (y1, y3) keep this strongly connected.
        assert!(solve(&w).is_converged());

        let order = crate::PreferenceProfile::from_rankings(3, &[vec![0, 1, 2]]).unwrap();
        let w = weights_copeland::<Rational>(
            &PairwiseTally::from_profile(&order),
            TiePolicy::HalfPoint,
        )
        .unwrap();
        let out = solve(&w);
        match &out.status {
            SolveStatus::Diverged {
                rising, falling, ..
            } => {
                assert_eq!(rising, &vec![0]);
                assert_eq!(falling, &vec![2]);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(out.r.iter().any(|x| x.abs() > 30.0));
        assert!(out.r[0] > out.r[1] && out.r[1] > out.r[2]);
        let mut prev = f64::INFINITY;
        for t in [0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let l: f64 = loss(&w, &[t, 0.0, -t]).unwrap();
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let w = WeightMatrix::new(vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 2.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(
            solve_mle(&w, &SolverConfig::<f64>::default()),
            Err(Error::DisconnectedGraph)
        );
    }

    #[test]
    fn config_validation() {
        let w = std_weights(&paradox());
        let bad = SolverConfig::<f64> {
            grad_tol: 0.0,
            ..Default::default()
        };
        assert!(solve_mle(&w, &bad).is_err());
        let bad = SolverConfig::<f64> {
            divergence_radius: -1.0,
            ..Default::default()
        };
        assert!(solve_mle(&w, &bad).is_err());
    }

    #[test]
    fn gpm_weights_recover_target() {
        let p = ResponseDistribution::new(vec![rational(9, 13), rational(3, 13), rational(1, 13)])
            .unwrap();
        let out = solve(&weights_gpm(&p).unwrap());
        assert!(out.is_converged());
        let q = crate::reward::softmax(&out).unwrap();
        assert!(q.max_gap(&p.to_f64()).unwrap().1 <= 1e-6);
        let g: Vec<f64> = gradient(&weights_gpm(&p).unwrap(), &out.r).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn gradient_descent_agrees_with_newton() {
        let w = std_weights(&four_voter());
        let a = solve(&w);
        let cfg = SolverConfig::default().with_method(SolveMethod::GradientDescentLineSearch);
        let b: RewardVector<f64> = solve_mle(&w, &cfg).unwrap();
        assert!(b.is_converged());
        for (x, y) in a.r.iter().zip(&b.r) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn regularization_tames_divergence() {
        let order = crate::PreferenceProfile::from_rankings(3, &[vec![0, 1, 2]]).unwrap();
        let w = weights_copeland::<Rational>(
            &PairwiseTally::from_profile(&order),
            TiePolicy::HalfPoint,
        )
        .unwrap();
        let out: RewardVector<f64> =
            solve_mle(&w, &SolverConfig::default().with_regularization(1e-8)).unwrap();
        assert!(out.is_converged());
        assert_eq!(out.ranking(1e-8).order(), vec![0, 1, 2]);
        assert!(out.ranking(1e-8).is_strict());
    }

    #[test]
    fn f32_solver_runs() {
        let w = std_weights(&four_voter());
        let cfg = SolverConfig::<f32> {
            grad_tol: 1e-5,
            ..Default::default()
        };
        let out = solve_mle(&w, &cfg).unwrap();
        assert!(out.is_converged());
        assert!((out.r[0] - 0.343_006_4).abs() < 1e-4);
    }

    #[test]
    fn ranking_groups_near_ties() {
        let rv = RewardVector {
            r: vec![0.5f64, -1.0, 0.5 - 1e-12, 0.0],
            status: SolveStatus::Converged {
                grad_norm: 0.0,
                iterations: 0,
            },
        };
        assert_eq!(rv.ranking(1e-8).tiers(), &[vec![0, 2], vec![3], vec![1]]);
    }

    #[test]
    fn drift_levels_for_layered_graph() {
        // y1 beats everyone, y2 and y3 cycle, y4 loses to everyone.
        let w: Vec<Vec<f64>> = vec![
            vec![0.0, 1.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ];
        let d = drift(&w).unwrap();
        assert_eq!(d.rising, vec![0]);
        assert_eq!(d.falling, vec![3]);
        assert!(d.direction[0] > d.direction[1] && d.direction[1] == d.direction[2]);
        assert!(d.direction[2] > d.direction[3]);
        assert!(drift(&[vec![0.0, 1.0], vec![1.0, 0.0]]).is_none());
    }
}
