//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use prefaxiom::axioms::{
    bt_embeddable, counterexample_search, embedding, equally_preferred, evaluate, AxiomId,
    CheckOptions, Embedding, RuleUnderTest, SearchSpace,
};
use prefaxiom::gpmd::{
    enumerate_embeddable_partitions, gpm_pipeline, gpmd, gpmd_via_partition, EpsilonPolicy,
};
use prefaxiom::profile::{generate_complete, seeded_rng, tournament_profile, transposition};
use prefaxiom::reward::{
    gradient, loss, rank_by_scores, softmax, solve_mle, weights_copeland, weights_standard,
    WeightMatrix,
};
use prefaxiom::rules::{first_place_shares, RankTiePolicy, TiePolicy};
use prefaxiom::scalar::{rational, sigmoid};
use prefaxiom::{PairwiseTally, PreferenceProfile, Rational, Solver};
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

/// Candidates grouped by equal integer key, highest first.
fn tiers_by_key(keys: &[i64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].cmp(&keys[a]).then(a.cmp(&b)));
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    for c in order {
        match tiers.last_mut() {
            Some(t) if keys[t[0]] == keys[c] => t.push(c),
            _ => tiers.push(vec![c]),
        }
    }
    tiers
}

fn random_profile(seed: u64, n_max: usize, m_max: usize) -> PreferenceProfile {
    let mut rng = seeded_rng(seed, 1);
    let n = rng.gen_range(2..=n_max);
    let m = rng.gen_range(1..=m_max);
    generate_complete(n, m, seed).expect("valid sizes")
}

fn interior(tally: &PairwiseTally) -> bool {
    let n = tally.n();
    (0..n).all(|i| (0..n).all(|j| i == j || (tally.wins()[i][j] > 0 && tally.wins()[j][i] > 0)))
}

/// Borda ordering from raw win sums; every pair total is `m`, so the sum
/// orders exactly as `Σ_k P(i ≻ k)`.
fn borda_oracle(tally: &PairwiseTally) -> Vec<Vec<usize>> {
    let keys: Vec<i64> = tally
        .wins()
        .iter()
        .map(|row| row.iter().map(|&w| w as i64).sum())
        .collect();
    tiers_by_key(&keys)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let solver = Solver::default();
    let (mut converged, mut regularized) = (0, 0);
    for seed in 0..500u64 {
        let profile = random_profile(1_000 + seed, 6, 9);
        let tally = PairwiseTally::from_profile(&profile);
        let w = weights_standard::<Rational>(&tally);
        let fit = solve_mle(&w, &solver).map_err(e)?;
        let ranking = if fit.is_converged() {
            converged += 1;
            fit.ranking(1e-8)
        } else {
            ensure(!interior(&tally), || {
                format!("seed {seed}: interior tally did not converge")
            })?;
            regularized += 1;
            let reg = solve_mle(&w, &solver.clone().with_regularization(1e-8)).map_err(e)?;
            ensure(reg.is_converged(), || {
                format!("seed {seed}: regularized fit did not converge")
            })?;
            reg.ranking(1e-8)
        };
        let expected = borda_oracle(&tally);
        ensure(ranking.tiers() == expected.as_slice(), || {
            format!(
                "seed {seed}: MLE {:?} vs Borda {:?}",
                ranking.tiers(),
                expected
            )
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "500 profiles, {converged} converged, {regularized} via ridge, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn copeland_oracle(tally: &PairwiseTally) -> Vec<Vec<usize>> {
    let n = tally.n();
    let doubled: Vec<i64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| match tally.wins()[i][j].cmp(&tally.wins()[j][i]) {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                })
                .sum()
        })
        .collect();
    tiers_by_key(&doubled)
}

fn criterion_2() -> Check {
    let check = |profile: &PreferenceProfile, label: String| -> Result<(), String> {
        let tally = PairwiseTally::from_profile(profile);
        let w = weights_copeland::<Rational>(&tally, TiePolicy::HalfPoint).map_err(e)?;
        let got = rank_by_scores(&w, RankTiePolicy::GroupTies).map_err(e)?;
        let expected = copeland_oracle(&tally);
        ensure(got.tiers() == expected.as_slice(), || {
            format!("{label}: {:?} vs {expected:?}", got.tiers())
        })
    };
    let space = SearchSpace::ExhaustiveComplete { n: 3, m: 3 };
    for i in 0..space.size() as u64 {
        check(&space.profile_at(i).map_err(e)?, format!("exhaustive #{i}"))?;
    }
    for seed in 0..1000u64 {
        check(
            &random_profile(50_000 + seed, 6, 9),
            format!("random seed {seed}"),
        )?;
    }
    Ok(format!("{} exhaustive + 1000 random, exact", space.size()))
}

fn criterion_3() -> Check {
    let (mut winners, mut transitive) = (0, 0);
    for n in [4usize, 5] {
        let pairs = n * (n - 1) / 2;
        for bits in 0..1u64 << pairs {
            let profile = tournament_profile(n, bits).map_err(e)?;
            let tally = PairwiseTally::from_profile(&profile);
            let out_degree: Vec<i64> = (0..n)
                .map(|i| (0..n).filter(|&j| tally.wins()[i][j] > 0).count() as i64)
                .collect();
            let ranking = rank_by_scores(
                &weights_standard::<Rational>(&tally),
                RankTiePolicy::GroupTies,
            )
            .map_err(e)?;
            if let Some(cw) = out_degree.iter().position(|&d| d == n as i64 - 1) {
                winners += 1;
                ensure(ranking.tiers()[0] == [cw], || {
                    format!("n={n} bits={bits}: winner {cw} not uniquely first")
                })?;
            }
            let mut sorted = out_degree.clone();
            sorted.sort_unstable();
            if sorted == (0..n as i64).collect::<Vec<_>>() {
                transitive += 1;
                let expected = tiers_by_key(&out_degree);
                ensure(ranking.tiers() == expected.as_slice(), || {
                    format!("n={n} bits={bits}: order not recovered")
                })?;
            }
        }
    }
    ensure(transitive == 24 + 120, || {
        format!("found {transitive} transitive tournaments")
    })?;
    Ok(format!("64 + 1024 tournaments, {winners} with a Condorcet winner, {transitive} transitive, 0 violations"))
}

fn criterion_4() -> Check {
    let opts = CheckOptions::default();
    let mut checked = 0;
    let spaces = [
        SearchSpace::ExhaustiveComplete { n: 3, m: 3 },
        SearchSpace::RandomComplete {
            n: 4,
            m: 5,
            trials: 5000,
            seed: 4,
        },
    ];
    for space in spaces {
        for i in 0..space.size() as u64 {
            let profile = space.profile_at(i).map_err(e)?;
            for axiom in AxiomId::ORDINAL {
                let report =
                    evaluate(RuleUnderTest::Copeland, axiom, &profile, &opts).map_err(e)?;
                let report = report.ok_or_else(|| format!("{space:?} #{i}: {axiom} undefined"))?;
                ensure(report.satisfied, || {
                    format!("{space:?} #{i}: Copeland violates {axiom}")
                })?;
                checked += 1;
            }
        }
    }
    let mut borda = None;
    for m in 1..=5 {
        if let Some(hit) = counterexample_search(
            RuleUnderTest::Borda,
            AxiomId::Condorcet,
            SearchSpace::ExhaustiveComplete { n: 3, m },
        )
        .map_err(e)?
        {
            borda = Some((m, hit.index));
            break;
        }
    }
    let (m, index) =
        borda.ok_or("Borda never fails Condorcet consistency in ExhaustiveComplete(3, <=5)")?;
    Ok(format!("{checked} Copeland checks pass; Borda fails Condorcet at ExhaustiveComplete(3,{m}) #{index}"))
}

fn criterion_5() -> Check {
    const TOTAL: u64 = 1 << 53;
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let mut rng = seeded_rng(seed, 5);
        let n = rng.gen_range(2..=8);
        let r0: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect();
        let mut wins = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = (sigmoid(r0[i] - r0[j]) * TOTAL as f64).round() as u64;
                wins[i][j] = w;
                wins[j][i] = TOTAL - w;
            }
        }
        let tally = PairwiseTally::from_wins(wins).map_err(e)?;
        let fit = bt_embeddable(&tally, 1e-9)
            .map_err(e)?
            .ok_or_else(|| format!("seed {seed}: rejected"))?;
        let mean = r0.iter().sum::<f64>() / n as f64;
        for (a, b) in fit.r.iter().zip(&r0) {
            worst = worst.max((a - (b - mean)).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("round-trip error {worst:e}"))?;

    let paradox =
        PreferenceProfile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]])
            .map_err(e)?;
    let tally = PairwiseTally::from_profile(&paradox);
    ensure(bt_embeddable(&tally, 1e-9).map_err(e)?.is_none(), || {
        "paradox accepted".into()
    })?;
    let residual = match embedding(&tally).map_err(e)? {
        Embedding::Interior { residual, .. } => residual,
        Embedding::Boundary { .. } => return Err("paradox tally reported as boundary".into()),
    };
    let expected = 3.0 * 2f64.ln();
    ensure((residual - expected).abs() <= 1e-12, || {
        format!("paradox residual {residual} vs {expected}")
    })?;
    Ok(format!(
        "200 round trips, max error {worst:.2e}; paradox residual {residual:.15}"
    ))
}

fn criterion_6() -> Check {
    let solver = Solver::default();
    let (mut used, mut tried, mut worst) = (0, 0u64, 0.0f64);
    while used < 100 {
        tried += 1;
        let mut rng = seeded_rng(tried, 6);
        let n = rng.gen_range(3..=5);
        let m = rng.gen_range(2..=5);
        let base = generate_complete(n, m, 60_000 + tried).map_err(e)?;
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let profile = base
            .union(&base.apply_permutation(&transposition(n, i, j)).map_err(e)?)
            .map_err(e)?;
        ensure(equally_preferred(&profile, i, j).map_err(e)?, || {
            format!("draw {tried}: ({i} {j}) not symmetric")
        })?;
        let fit = solve_mle(
            &weights_standard::<Rational>(&PairwiseTally::from_profile(&profile)),
            &solver,
        )
        .map_err(e)?;
        // Softmax exists only when the likelihood has a finite maximizer.
        let Ok(p) = softmax(&fit) else { continue };
        used += 1;
        worst = worst.max((p.values()[i] - p.values()[j]).abs());
    }
    ensure(worst <= 1e-6, || format!("max |p_i - p_j| = {worst:e}"))?;
    Ok(format!("100 symmetrized profiles ({tried} drawn, divergent fits skipped), max |p_i - p_j| = {worst:.2e}"))
}

fn criterion_7() -> Check {
    let (mut partitions, mut worst) = (0, 0.0f64);
    for seed in 0..100u64 {
        let profile = random_profile(70_000 + seed, 5, 6);
        let direct = gpmd::<Rational>(&profile, &EpsilonPolicy::Limit)
            .map_err(e)?
            .to_f64();
        for partition in enumerate_embeddable_partitions(&profile, 32).map_err(e)? {
            let via = gpmd_via_partition(&profile, &partition, &EpsilonPolicy::Limit).map_err(e)?;
            worst = worst.max(via.distribution.max_gap(&direct).map_err(e)?.1);
            partitions += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max gap {worst:e}"))?;
    Ok(format!(
        "100 profiles, {partitions} partitions, max gap {worst:.2e}"
    ))
}

fn criterion_8() -> Check {
    let solver = Solver::default();
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let mut rng = seeded_rng(seed, 8);
        let profile = random_profile(80_000 + seed, 6, 9);
        let eps = EpsilonPolicy::finite(rational(rng.gen_range(1..=49), 100)).map_err(e)?;
        let out = gpm_pipeline(&profile, &eps, &solver).map_err(e)?;
        ensure(out.target.values().iter().all(|&p| p > 0.0), || {
            format!("seed {seed}: target not interior")
        })?;
        worst = worst.max(out.gap());
    }
    ensure(worst <= 1e-6, || format!("max recovery error {worst:e}"))?;
    Ok(format!(
        "200 interior targets, max |recovered - target| = {worst:.2e}"
    ))
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let mut full = vec!["prefaxiom"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let out = prefaxiom_cli::run(full);
    ensure(out.code == 0, || {
        format!("exit {}: {}", out.code, out.stderr)
    })?;
    serde_json::from_str(&out.stdout).map_err(e)
}

fn mle_gpmd_gap(profile: &PreferenceProfile) -> Result<f64, String> {
    let fit = solve_mle(
        &weights_standard::<Rational>(&PairwiseTally::from_profile(profile)),
        &Solver::default(),
    )
    .map_err(e)?;
    let p = softmax(&fit).map_err(e)?;
    let q = first_place_shares::<Rational>(profile).map_err(e)?.to_f64();
    Ok(p.max_gap(&q).map_err(e)?.1)
}

fn criterion_9() -> Check {
    let v = run_cli(&[
        "search",
        "--rule",
        "mle-standard",
        "--axiom",
        "group-preference-matching",
        "--space",
        "random-complete:n=3,m=4,trials=10000",
        "--seed",
        "2024",
        "--tol",
        "0.05",
    ])?;
    let hit = &v["result"]["results"][0];
    ensure(hit["outcome"] == "violated", || {
        "no profile found in 10^4 trials".into()
    })?;
    let doc = serde_json::to_vec(&hit["profile"]).map_err(e)?;
    let profile = prefaxiom::profile::parse_profile(&doc).map_err(e)?;
    let found_gap = mle_gpmd_gap(&profile)?;
    ensure(found_gap > 0.05, || {
        format!("searched profile gap {found_gap}")
    })?;

    // {2A, 1B, 1C}: r = (s, 0, -s) with σ(s) + σ(2s) = 5/4, solved by bisection.
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sigmoid(mid) + sigmoid(2.0 * mid) < 1.25 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let s = 0.5 * (lo + hi);
    let z = s.exp() + 1.0 + (-s).exp();
    let oracle = [s.exp() / z, 1.0 / z, (-s).exp() / z];
    let oracle_gap = oracle
        .iter()
        .zip([0.5, 0.25, 0.25])
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    let four = PreferenceProfile::from_rankings(
        3,
        &[vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
    )
    .map_err(e)?;
    let gap = mle_gpmd_gap(&four)?;
    ensure((gap - oracle_gap).abs() < 1e-9, || {
        format!("fixture gap {gap} vs oracle {oracle_gap}")
    })?;
    ensure((0.05..=0.08).contains(&gap), || {
        format!("fixture gap {gap} outside [0.05, 0.08]")
    })?;
    Ok(format!(
        "search hit #{} with gap {found_gap:.4}; fixture gap {gap:.6} (oracle {oracle_gap:.6})",
        hit["index"]
    ))
}

fn point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()
}

fn criterion_10() -> Check {
    let h = 1e-6;
    let (mut worst_grad, mut worst_convex) = (0.0f64, f64::NEG_INFINITY);
    for seed in 0..100u64 {
        let mut rng = seeded_rng(seed, 10);
        let n = rng.gen_range(2..=7);
        let w: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else { rng.gen_range(0.0..3.0) })
                    .collect()
            })
            .collect();
        let w = WeightMatrix::new(w).map_err(e)?;
        let (r, a, b) = (point(&mut rng, n), point(&mut rng, n), point(&mut rng, n));
        let g: Vec<f64> = gradient(&w, &r).map_err(e)?;
        for k in 0..n {
            let (mut up, mut down) = (r.clone(), r.clone());
            up[k] += h;
            down[k] -= h;
            let fd = (loss(&w, &up).map_err(e)? - loss(&w, &down).map_err(e)?) / (2.0 * h);
            worst_grad = worst_grad.max((g[k] - fd).abs());
        }
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let lhs: f64 = loss(&w, &mid).map_err(e)?;
        let rhs = 0.5 * (loss(&w, &a).map_err(e)? + loss(&w, &b).map_err(e)?);
        worst_convex = worst_convex.max(lhs - rhs);
    }
    ensure(worst_grad <= 1e-6, || {
        format!("gradient error {worst_grad:e}")
    })?;
    ensure(worst_convex <= 1e-9, || {
        format!("midpoint excess {worst_convex:e}")
    })?;
    Ok(format!(
        "max gradient error {worst_grad:.2e}; max midpoint excess {worst_convex:.2e}"
    ))
}

/// No-winner count over all 6^3 profiles, computed from scratch.
fn exact_no_winner_3x3() -> f64 {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let pos = |p: &[usize; 3], c: usize| p.iter().position(|&x| x == c).unwrap();
    let mut none = 0;
    for a in &perms {
        for b in &perms {
            for c in &perms {
                let voters = [a, b, c];
                let beats = |x: usize, y: usize| {
                    voters.iter().filter(|v| pos(v, x) < pos(v, y)).count() >= 2
                };
                if !(0..3).any(|x| (0..3).all(|y| y == x || beats(x, y))) {
                    none += 1;
                }
            }
        }
    }
    none as f64 / 216.0
}

fn criterion_11() -> Check {
    let v = run_cli(&[
        "experiment-cycles",
        "--n-list",
        "3,10",
        "--m",
        "3",
        "--trials",
        "10000",
        "--seed",
        "11",
    ])?;
    let rows = v["result"]["rows"].as_array().ok_or("no rows")?;
    let f3 = rows[0]["frequency"].as_f64().ok_or("no frequency")?;
    let se3 = rows[0]["std_error"].as_f64().ok_or("no std error")?;
    let f10 = rows[1]["frequency"].as_f64().ok_or("no frequency")?;
    let exact = exact_no_winner_3x3();
    ensure(
        rows[0]["exact"] == "1/18" && (exact - 1.0 / 18.0).abs() < 1e-15,
        || format!("exact value {} vs enumeration {exact}", rows[0]["exact"]),
    )?;
    ensure((f3 - exact).abs() <= 3.0 * se3, || {
        format!("n=3 frequency {f3} vs exact {exact} (se {se3})")
    })?;
    ensure(f10 > f3, || {
        format!("n=10 frequency {f10} not above n=3 frequency {f3}")
    })?;
    Ok(format!(
        "n=3: {f3} vs exact 1/18 ({:+.2} se); n=10: {f10}",
        (f3 - exact) / se3
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("Borda equivalence", criterion_1),
        ("Copeland equivalence", criterion_2),
        ("tournament consistency", criterion_3),
        ("Copeland ordinal axioms", criterion_4),
        ("BT embeddability", criterion_5),
        ("preference equivalence", criterion_6),
        ("GPMD partition independence", criterion_7),
        ("GPM loss recovery", criterion_8),
        ("MLE differs from GPMD", criterion_9),
        ("numerics", criterion_10),
        ("cycle frequency", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {name}: {detail} [{:.1}s]",
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of 11 criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
