use prefaxiom::profile::{generate_complete, seeded_rng, PairwiseTally};
use prefaxiom::reward::{
    scores, solve_mle, weights_copeland, weights_standard, RewardVector, SolverConfig,
};
use prefaxiom::rules::TiePolicy;
use prefaxiom::scalar::sigmoid;
use prefaxiom::{Rational, Solver, Weights};
use rand::Rng;

fn assert_orders_like_scores(w: &Weights, r: &RewardVector<f64>) {
    let m: Vec<f64> = scores(w).unwrap().values.iter().map(num).collect();
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            let s = &scores(w).unwrap().values;
            if s[i] == s[j] {
                assert!(
                    (r.r[i] - r.r[j]).abs() <= 1e-8,
                    "equal scores {m:?} gave {:?}",
                    r.r
                );
            } else if s[i] > s[j] {
                assert!(r.r[i] > r.r[j], "scores {m:?} rewards {:?}", r.r);
            }
        }
    }
}

fn num(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap()
}

#[test]
fn solver_ordering_matches_scores() {
    let mut converged = 0;
    let mut diverged = 0;
    for seed in 0..200u64 {
        let n = 3 + (seed % 4) as usize;
        let m = 2 + (seed % 7) as usize;
        let p = generate_complete(n, m, seed).unwrap();
        let t = PairwiseTally::from_profile(&p);
        let weights = if seed % 2 == 0 {
            weights_standard(&t)
        } else {
            weights_copeland(&t, TiePolicy::HalfPoint).unwrap()
        };
        let out = solve_mle(&weights, &Solver::default()).unwrap();
        if out.is_converged() {
            converged += 1;
            assert!(out.r.iter().sum::<f64>().abs() <= 1e-12);
            assert_orders_like_scores(&weights, &out);
        } else {
            assert!(out.is_diverged(), "seed {seed}: {:?}", out.status);
            diverged += 1;
            let reg = solve_mle(&weights, &Solver::default().with_regularization(1e-8)).unwrap();
            assert!(reg.is_converged(), "seed {seed}: {:?}", reg.status);
            assert_orders_like_scores(&weights, &reg);
        }
    }
    assert!(converged > 50 && diverged > 20, "{converged} / {diverged}");
}

#[test]
fn standard_weights_recover_exact_bt_rewards() {
    let total: u64 = 1 << 53;
    for seed in 0..50u64 {
        let mut rng = seeded_rng(seed, 3);
        let n = 2 + (seed % 6) as usize;
        let truth: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut wins = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let a = (sigmoid(truth[i] - truth[j]) * total as f64).round() as u64;
                wins[i][j] = a;
                wins[j][i] = total - a;
            }
        }
        let t = PairwiseTally::from_wins(wins).unwrap();
        let w: Weights = weights_standard(&t);
        let out = solve_mle(&w, &SolverConfig::default()).unwrap();
        assert!(out.is_converged());
        let shift = truth.iter().sum::<f64>() / n as f64;
        for (got, want) in out.r.iter().zip(&truth) {
            assert!(
                (got - (want - shift)).abs() <= 1e-8,
                "seed {seed}: {got} vs {}",
                want - shift
            );
        }
    }
}
