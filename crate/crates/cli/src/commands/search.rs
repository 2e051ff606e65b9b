use prefaxiom::axioms::{counterexample_search_with, CheckOptions, SearchSpace};
use prefaxiom::profile::serialize_profile;
use prefaxiom::PreferenceProfile;
use serde_json::{json, Value};

use super::axioms::{report_json, witness_text};
use super::{epsilon_text, parse_axioms, parse_epsilon, parse_rule, ranking_text};
use crate::args::SearchArgs;
use crate::report::{Report, Table};
use crate::CliError;

/// Parses `kind:key=value,...`; random spaces take their seed from `seed`.
pub(crate) fn parse_space(spec: &str, seed: Option<u64>) -> Result<SearchSpace, CliError> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut fields = std::collections::BTreeMap::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("space field {part:?} is not key=value")))?;
        let v: u64 = v.trim().replace('_', "").parse().map_err(|_| {
            CliError::usage(format!("space field {k} needs a non-negative integer"))
        })?;
        fields.insert(k.trim().to_string(), v);
    }
    let allowed: &[&str] = match kind {
        "exhaustive-complete" | "random-complete" => &["n", "m", "trials"],
        "assumption1" | "assumption1-exhaustive" => &["n", "trials"],
        other => {
            return Err(CliError::usage(format!(
                "unknown space {other:?}; expected exhaustive-complete, random-complete, assumption1 or assumption1-exhaustive"
            )))
        }
    };
    if let Some(k) = fields.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::usage(format!("space {kind} has no field {k:?}")));
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| CliError::usage(format!("space {kind} needs {k}=")))
    };
    let need_seed =
        || seed.ok_or_else(|| CliError::usage(format!("space {kind} is random; pass --seed")));
    Ok(match kind {
        "exhaustive-complete" => SearchSpace::ExhaustiveComplete {
            n: get("n")? as usize,
            m: get("m")? as usize,
        },
        "random-complete" => SearchSpace::RandomComplete {
            n: get("n")? as usize,
            m: get("m")? as usize,
            trials: get("trials")?,
            seed: need_seed()?,
        },
        "assumption1" => SearchSpace::Assumption1 {
            n: get("n")? as usize,
            trials: get("trials")?,
            seed: need_seed()?,
        },
        _ => SearchSpace::Assumption1Exhaustive {
            n: get("n")? as usize,
        },
    })
}

/// Ballots in one line, `;` between voters.
pub(crate) fn profile_text(profile: &PreferenceProfile) -> String {
    let names = profile.candidates();
    profile
        .voters()
        .iter()
        .map(|v| match &v.ballot {
            prefaxiom::Ballot::Ranked(r) => ranking_text(r, names),
            prefaxiom::Ballot::Comparisons(cs) => cs
                .iter()
                .map(|c| format!("{}>{}", names.name(c.winner), names.name(c.loser)))
                .collect::<Vec<_>>()
                .join(" "),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn profile_json(profile: &PreferenceProfile) -> Value {
    serde_json::from_slice(&serialize_profile(profile)).expect("serialized profile is JSON")
}

pub fn run(args: &SearchArgs) -> Result<Report, CliError> {
    let rule = parse_rule(&args.rule)?;
    let axioms = parse_axioms(&args.axiom)?;
    let space = parse_space(&args.space, args.seed)?;
    let gpm_epsilon = parse_epsilon(&args.epsilon)?;
    let target_epsilon = parse_epsilon(&args.target_epsilon)?;
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(CliError::usage("--tol must be non-negative"));
    }
    let opts = CheckOptions {
        tol: args.tol,
        target_epsilon: target_epsilon.clone(),
        gpm_epsilon: gpm_epsilon.clone(),
        limit: args.budget,
        ..CheckOptions::default()
    };

    let mut report = Report::new("search", format!("Counterexample search for {rule}"));
    report
        .param("rule", rule.name())
        .param(
            "axioms",
            axioms.iter().map(|a| a.name()).collect::<Vec<_>>(),
        )
        .param(
            "space",
            serde_json::to_value(space).expect("space serializes"),
        )
        .param("space_size", space.size().to_string())
        .param("budget", args.budget.to_string())
        .param("tol", args.tol)
        .param("epsilon", epsilon_text(&gpm_epsilon))
        .param("target_epsilon", epsilon_text(&target_epsilon));

    let mut table = Table::new(
        "search",
        &["axiom", "outcome", "index", "witness", "profile"],
    );
    let mut rows = Vec::new();
    let mut first_hit: Option<PreferenceProfile> = None;
    for axiom in axioms {
        if axiom.is_distributional() && !rule.is_probabilistic() {
            table.row(vec![
                axiom.name().into(),
                "skipped".into(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            rows.push(json!({"axiom": axiom.name(), "outcome": "skipped"}));
            continue;
        }
        match counterexample_search_with(rule, axiom, space, &opts)? {
            None => {
                table.row(vec![
                    axiom.name().into(),
                    "none".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                rows.push(json!({"axiom": axiom.name(), "outcome": "none"}));
            }
            Some(hit) => {
                let names = hit.profile.candidates();
                let witness = hit
                    .report
                    .witness
                    .as_ref()
                    .map(|w| witness_text(w, names))
                    .unwrap_or_default();
                table.row(vec![
                    axiom.name().into(),
                    "violated".into(),
                    hit.index.to_string(),
                    witness,
                    profile_text(&hit.profile),
                ]);
                rows.push(json!({
                    "axiom": axiom.name(),
                    "outcome": "violated",
                    "index": hit.index,
                    "report": report_json(&hit.report),
                    "profile": profile_json(&hit.profile),
                }));
                first_hit.get_or_insert(hit.profile);
            }
        }
    }
    report.table(table);

    let written = match (&args.out, &first_hit) {
        (Some(path), Some(profile)) => {
            std::fs::write(path, serialize_profile(profile))
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
            report.note(format!(
                "First counterexample written to {}.",
                path.display()
            ));
            Some(path.display().to_string())
        }
        (_, None) => {
            report.note("Search space exhausted without a violation.");
            None
        }
        (None, Some(_)) => None,
    };
    report.result = json!({
        "found": first_hit.is_some(),
        "results": rows,
        "written": written,
    });
    Ok(report)
}
