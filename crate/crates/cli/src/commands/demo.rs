use prefaxiom::axioms::{
    check_pareto, check_preference_equivalence, embedding, AxiomId, Embedding, RuleUnderTest,
    SearchSpace,
};
use prefaxiom::gpmd::{gpmd, EpsilonPolicy};
use prefaxiom::profile::{has_condorcet_cycle, majority_relation};
use prefaxiom::rules::{borda_scores, condorcet_winner, copeland_scores, RankTiePolicy, TiePolicy};
use prefaxiom::{PairwiseTally, PreferenceProfile, Ranking, Rational};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::axioms::{report_json, verdict, witness_text};
use super::rank::{apply_rule, describe};
use super::search::{profile_json, profile_text};
use super::{exact_json, exact_table, matrix_table, ranking_json, ranking_text};
use crate::args::{DemoArgs, DemoName};
use crate::report::{fmt_float, num, Report};
use crate::CliError;

/// Largest electorate tried by the Borda/Copeland search.
const MAX_VOTERS: usize = 7;

pub fn run(args: &DemoArgs) -> Result<Report, CliError> {
    match args.name {
        DemoName::CondorcetParadox => condorcet_paradox(),
        DemoName::SingleVoterCycle => single_voter_cycle(),
        DemoName::BordaVsCopeland => borda_vs_copeland(),
    }
}

fn names_of(profile: &PreferenceProfile, cycle: &[usize]) -> String {
    let mut path: Vec<&str> = cycle
        .iter()
        .map(|&k| profile.candidates().name(k))
        .collect();
    path.push(profile.candidates().name(cycle[0]));
    path.join(" -> ")
}

fn condorcet_paradox() -> Result<Report, CliError> {
    let profile =
        PreferenceProfile::from_rankings(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]])?;
    let names = profile.candidates();
    let tally = PairwiseTally::from_profile(&profile);

    let mut report = Report::new("demo", "Condorcet paradox");
    report
        .param("demo", "condorcet-paradox")
        .param("profile", profile_text(&profile));
    report.table(matrix_table("proportions", names, |i, j| {
        if i == j {
            "-".into()
        } else {
            tally.prop_opt(i, j).map_or("-".into(), |p| p.to_string())
        }
    }));

    let cycle = has_condorcet_cycle(&majority_relation(&tally))?.unwrap_or_default();
    report.note(format!(
        "Each candidate beats the next by 2/3 of the voters: {}. There is no Condorcet winner.",
        names_of(&profile, &cycle)
    ));

    let borda = borda_scores::<Rational>(&tally)?;
    let copeland = copeland_scores::<Rational>(&tally, TiePolicy::HalfPoint)?;
    report.note(format!(
        "Borda and Copeland both tie all three: {} and {}.",
        ranking_text(&borda.ranking(RankTiePolicy::GroupTies), names),
        ranking_text(&copeland.ranking(RankTiePolicy::GroupTies), names)
    ));
    report.table(exact_table("borda", names, &borda.values));

    let mle = apply_rule(
        &profile,
        RuleUnderTest::MleStandard,
        TiePolicy::HalfPoint,
        &EpsilonPolicy::default(),
    )?;
    let mle_json = describe(&mut report, &profile, &mle);

    let residual = match embedding(&tally)? {
        Embedding::Interior { residual, .. } => residual,
        Embedding::Boundary { .. } => f64::INFINITY,
    };
    report.note(format!(
        "No reward vector reproduces the proportions: the log-odds around the cycle sum to 3 ln 2, residual {}.",
        fmt_float(residual)
    ));

    let limit = gpmd::<Rational>(&profile, &EpsilonPolicy::Limit)?;
    report.table(exact_table("gpmd-limit", names, limit.values()));

    let equivalence = match &mle.distribution {
        Some(d) => Some(check_preference_equivalence(
            &profile,
            &prefaxiom::Distribution::new(d.clone())?,
            prefaxiom::axioms::DIST_TOL,
        )?),
        None => None,
    };
    if let Some(r) = &equivalence {
        report.note(format!(
            "Every pair is equally preferred; preference equivalence is {} by the MLE softmax.",
            verdict(r)
        ));
    }

    report.result = json!({
        "profile": profile_json(&profile),
        "cycle": cycle.iter().map(|&k| names.name(k)).collect::<Vec<_>>(),
        "borda": exact_json(&borda.values),
        "copeland": exact_json(&copeland.values),
        "mle_standard": mle_json,
        "embedding_residual": num(residual),
        "gpmd_limit": exact_json(limit.values()),
        "preference_equivalence": equivalence.as_ref().map(report_json).unwrap_or(Value::Null),
    });
    Ok(report)
}

fn single_voter_cycle() -> Result<Report, CliError> {
    let profile = PreferenceProfile::from_comparisons(3, &[vec![(0, 1), (1, 2), (2, 0)]])?;
    let names = profile.candidates();

    let mut report = Report::new("demo", "Single labeler with cyclic judgments");
    report
        .param("demo", "single-voter-cycle")
        .param("profile", profile_text(&profile));
    report.note("One labeler compares each pair once and the judgments form a cycle.");

    let mle = apply_rule(
        &profile,
        RuleUnderTest::MleStandard,
        TiePolicy::HalfPoint,
        &EpsilonPolicy::default(),
    )?;
    let mle_json = describe(&mut report, &profile, &mle);
    let pareto = check_pareto(&profile, &mle.ranking)?;
    let witness = pareto
        .witness
        .as_ref()
        .map(|w| witness_text(w, names))
        .unwrap_or_default();
    report.note(format!(
        "The fit assigns equal rewards, yet every pair is decided unanimously, so Pareto optimality is {}: {}.",
        verdict(&pareto),
        witness
    ));
    report.note(
        "Reading a cyclic unanimous relation as leaving Pareto undefined would instead make the check vacuous.",
    );
    report.result = json!({
        "profile": profile_json(&profile),
        "mle_standard": mle_json,
        "pareto": report_json(&pareto),
    });
    Ok(report)
}

/// A profile whose Condorcet winner is beaten outright by another
/// candidate's Borda score.
fn strict_borda_upset(profile: &PreferenceProfile) -> Result<Option<(usize, usize)>, CliError> {
    let tally = PairwiseTally::from_profile(profile);
    let Some(winner) = condorcet_winner(&tally)? else {
        return Ok(None);
    };
    let ranking: Ranking = borda_scores::<Rational>(&tally)?.ranking(RankTiePolicy::GroupTies);
    Ok(match ranking.tiers()[0].as_slice() {
        [top] if *top != winner => Some((winner, *top)),
        _ => None,
    })
}

fn borda_vs_copeland() -> Result<Report, CliError> {
    let mut found = None;
    for m in 1..=MAX_VOTERS {
        let space = SearchSpace::ExhaustiveComplete { n: 3, m };
        let hit = (0..space.size() as u64)
            .into_par_iter()
            .find_map_first(|i| {
                let step = || -> Result<Option<(u64, PreferenceProfile)>, CliError> {
                    let p = space.profile_at(i)?;
                    Ok(strict_borda_upset(&p)?.map(|_| (i, p)))
                };
                step().transpose()
            })
            .transpose()?;
        if let Some((index, profile)) = hit {
            found = Some((m, index, profile));
            break;
        }
    }
    let (m, index, profile) = found.ok_or_else(|| {
        CliError::usage(format!(
            "no upset among three candidates and up to {MAX_VOTERS} voters"
        ))
    })?;
    let names = profile.candidates();
    let tally = PairwiseTally::from_profile(&profile);
    let (winner, borda_top) = strict_borda_upset(&profile)?.expect("search hit");
    let borda = borda_scores::<Rational>(&tally)?;
    let copeland = copeland_scores::<Rational>(&tally, TiePolicy::HalfPoint)?;
    let copeland_ranking = copeland.ranking(RankTiePolicy::GroupTies);

    let mut report = Report::new("demo", "Borda versus Copeland");
    report
        .param("demo", "borda-vs-copeland")
        .param("space", format!("exhaustive-complete:n=3,m={m}"))
        .param("index", index)
        .param("profile", profile_text(&profile));
    report.note(format!(
        "Smallest electorate found: {m} voters. {} is the Condorcet winner, but {} has the strictly highest Borda score.",
        names.name(winner),
        names.name(borda_top)
    ));
    report.note(format!(
        "Copeland ranking: {}. Borda ranking: {}.",
        ranking_text(&copeland_ranking, names),
        ranking_text(&borda.ranking(RankTiePolicy::GroupTies), names)
    ));
    report.table(exact_table("borda", names, &borda.values));
    report.table(exact_table("copeland", names, &copeland.values));
    let condorcet =
        prefaxiom::axioms::check_condorcet(&tally, &borda.ranking(RankTiePolicy::GroupTies))?;
    report.result = json!({
        "voters": m,
        "index": index,
        "profile": profile_json(&profile),
        "condorcet_winner": names.name(winner),
        "borda_top": names.name(borda_top),
        "borda": exact_json(&borda.values),
        "copeland": exact_json(&copeland.values),
        "copeland_ranking": ranking_json(&copeland_ranking, names),
        "borda_condorcet": report_json(&condorcet),
        "axiom": AxiomId::Condorcet.name(),
    });
    Ok(report)
}
