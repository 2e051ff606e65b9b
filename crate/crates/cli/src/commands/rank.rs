use prefaxiom::axioms::RuleUnderTest;
use prefaxiom::gpmd::{gpm_pipeline, EpsilonPolicy};
use prefaxiom::reward::{
    rank_by_scores, scores, softmax, solve_mle, weights_copeland, weights_standard, SolveStatus,
};
use prefaxiom::rules::{
    borda_scores, copeland_scores, first_place_shares, ranking_from_scores, RankTiePolicy,
    TiePolicy,
};
use prefaxiom::{PairwiseTally, PreferenceProfile, Ranking, Rational, Rewards, Solver, Weights};
use serde_json::{json, Value};

use super::{
    epsilon_text, exact_json, exact_table, float_table, floats_json, load_profile, parse_epsilon,
    parse_rule, ranking_json, ranking_text,
};
use crate::args::{CliTiePolicy, RankArgs};
use crate::report::{num, Report};
use crate::CliError;

/// Rewards closer than this share an indifference class.
pub(crate) const REWARD_TIE_TOL: f64 = 1e-8;
/// Ridge used to rank a divergent fit.
pub(crate) const FALLBACK_LAMBDA: f64 = 1e-8;

/// Everything one rule produces on one profile.
pub(crate) struct RuleOutput {
    pub ranking: Ranking,
    /// Exact scores with their label.
    pub scores: Option<(&'static str, Vec<Rational>)>,
    pub rewards: Option<Rewards>,
    pub distribution: Option<Vec<f64>>,
    /// Exact target of the mle-gpm rule.
    pub target: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl RuleOutput {
    fn ranked(ranking: Ranking, label: &'static str, values: Vec<Rational>) -> Self {
        Self {
            ranking,
            scores: Some((label, values)),
            rewards: None,
            distribution: None,
            target: None,
            notes: Vec::new(),
        }
    }
}

pub(crate) fn tie_policy(p: CliTiePolicy) -> TiePolicy {
    match p {
        CliTiePolicy::HalfPoint => TiePolicy::HalfPoint,
        CliTiePolicy::StrictOnly => TiePolicy::StrictOnly,
    }
}

pub(crate) fn apply_rule(
    profile: &PreferenceProfile,
    rule: RuleUnderTest,
    ties: TiePolicy,
    epsilon: &EpsilonPolicy<Rational>,
) -> Result<RuleOutput, CliError> {
    let tally = PairwiseTally::from_profile(profile);
    let solver = Solver::default();
    Ok(match rule {
        RuleUnderTest::Borda => {
            let s = borda_scores::<Rational>(&tally)?;
            RuleOutput::ranked(s.ranking(RankTiePolicy::GroupTies), "borda", s.values)
        }
        RuleUnderTest::Copeland => {
            let s = copeland_scores::<Rational>(&tally, ties)?;
            RuleOutput::ranked(s.ranking(RankTiePolicy::GroupTies), "copeland", s.values)
        }
        RuleUnderTest::MleStandard => mle(&weights_standard(&tally), &solver)?,
        RuleUnderTest::MleCopeland => mle(&weights_copeland(&tally, ties)?, &solver)?,
        RuleUnderTest::MleGpm => {
            let out = gpm_pipeline(profile, epsilon, &solver)?;
            RuleOutput {
                ranking: out.fitted.ranking(REWARD_TIE_TOL),
                scores: None,
                distribution: Some(out.recovered.values().to_vec()),
                target: Some(out.target.values().to_vec()),
                rewards: Some(out.fitted),
                notes: Vec::new(),
            }
        }
        RuleUnderTest::GpmdLimit => {
            let d = first_place_shares::<Rational>(profile)?;
            let mut out = RuleOutput::ranked(
                ranking_from_scores(d.values(), RankTiePolicy::GroupTies),
                "first-place share",
                d.values().to_vec(),
            );
            out.distribution = Some(d.to_f64().values().to_vec());
            out
        }
    })
}

/// Exact score ranking when the pair total is constant, otherwise the
/// ranking of the converged (or, if divergent, lightly regularized) fit.
fn mle(w: &Weights, solver: &Solver) -> Result<RuleOutput, CliError> {
    let fit = solve_mle(w, solver)?;
    let mut notes = Vec::new();
    let (ranking, score_values) = if w.is_constant_total() {
        (
            rank_by_scores(w, RankTiePolicy::GroupTies)?,
            Some(scores(w)?.values),
        )
    } else if fit.is_converged() {
        (fit.ranking(REWARD_TIE_TOL), None)
    } else {
        let reg = solve_mle(w, &solver.clone().with_regularization(FALLBACK_LAMBDA))?;
        notes.push(format!(
            "Pair totals differ and the fit diverges; ranking taken from the fit with ridge {FALLBACK_LAMBDA:e}."
        ));
        (reg.ranking(REWARD_TIE_TOL), None)
    };
    match &fit.status {
        SolveStatus::Diverged { .. } => notes
            .push("The likelihood has no finite maximizer; no distribution is reported.".into()),
        SolveStatus::MaxIters { .. } => {
            notes.push("The solver stopped at its iteration limit.".into())
        }
        SolveStatus::Converged { .. } => {}
    }
    let distribution = softmax(&fit).ok().map(|d| d.values().to_vec());
    Ok(RuleOutput {
        ranking,
        scores: score_values.map(|v| ("mle score", v)),
        rewards: Some(fit),
        distribution,
        target: None,
        notes,
    })
}

pub(crate) fn status_json(status: &SolveStatus<f64>, names: &prefaxiom::CandidateSet) -> Value {
    match status {
        SolveStatus::Converged {
            grad_norm,
            iterations,
        } => {
            json!({"status": "converged", "grad_norm": num(*grad_norm), "iterations": iterations})
        }
        SolveStatus::MaxIters {
            grad_norm,
            iterations,
        } => {
            json!({"status": "max-iters", "grad_norm": num(*grad_norm), "iterations": iterations})
        }
        SolveStatus::Diverged {
            rising,
            falling,
            iterations,
        } => json!({
            "status": "diverged",
            "rising": rising.iter().map(|&k| names.name(k)).collect::<Vec<_>>(),
            "falling": falling.iter().map(|&k| names.name(k)).collect::<Vec<_>>(),
            "iterations": iterations,
        }),
    }
}

pub(crate) fn status_text(status: &SolveStatus<f64>, names: &prefaxiom::CandidateSet) -> String {
    let list = |v: &[usize]| {
        v.iter()
            .map(|&k| names.name(k))
            .collect::<Vec<_>>()
            .join(", ")
    };
    match status {
        SolveStatus::Converged { iterations, .. } => {
            format!("converged in {iterations} iterations")
        }
        SolveStatus::MaxIters { iterations, .. } => {
            format!("stopped after {iterations} iterations")
        }
        SolveStatus::Diverged {
            rising, falling, ..
        } => {
            format!(
                "diverged: {{{}}} rise, {{{}}} fall",
                list(rising),
                list(falling)
            )
        }
    }
}

/// Adds the rule output's tables, notes and JSON fields to `report`.
pub(crate) fn describe(
    report: &mut Report,
    profile: &PreferenceProfile,
    out: &RuleOutput,
) -> Value {
    let names = profile.candidates();
    report.note(format!("Ranking: {}", ranking_text(&out.ranking, names)));
    for n in &out.notes {
        report.note(n.clone());
    }
    let mut result = serde_json::Map::new();
    result.insert("ranking".into(), ranking_json(&out.ranking, names));
    if let Some((label, values)) = &out.scores {
        report.table(exact_table("scores", names, values));
        result.insert("score_kind".into(), json!(label));
        result.insert("scores".into(), exact_json(values));
    }
    if let Some(fit) = &out.rewards {
        report.note(format!("Solver: {}.", status_text(&fit.status, names)));
        result.insert("solver".into(), status_json(&fit.status, names));
        if fit.is_converged() {
            result.insert("rewards".into(), floats_json(&fit.r));
        }
    }
    let mut columns: Vec<(&str, &[f64])> = Vec::new();
    if let Some(fit) = out.rewards.as_ref().filter(|f| f.is_converged()) {
        columns.push(("reward", &fit.r));
    }
    if let Some(t) = &out.target {
        columns.push(("target", t));
        result.insert("target".into(), floats_json(t));
    }
    if let Some(d) = &out.distribution {
        columns.push(("probability", d));
        result.insert("distribution".into(), floats_json(d));
    }
    if !columns.is_empty() {
        report.table(float_table("outputs", names, &columns));
    }
    Value::Object(result)
}

pub fn run(args: &RankArgs) -> Result<Report, CliError> {
    let profile = load_profile(&args.input)?;
    let rule = parse_rule(&args.rule)?;
    let epsilon = parse_epsilon(&args.epsilon)?;
    let ties = tie_policy(args.tie_policy);
    let out = apply_rule(&profile, rule, ties, &epsilon)?;

    let mut report = Report::new("rank", format!("Ranking under {rule}"));
    report
        .param("input", args.input.display().to_string())
        .param("rule", rule.name())
        .param("tie_policy", ties_name(ties));
    if rule == RuleUnderTest::MleGpm {
        report.param("epsilon", epsilon_text(&epsilon));
    }
    report.result = describe(&mut report, &profile, &out);
    Ok(report)
}

pub(crate) fn ties_name(t: TiePolicy) -> &'static str {
    match t {
        TiePolicy::HalfPoint => "half-point",
        TiePolicy::StrictOnly => "strict-only",
    }
}
