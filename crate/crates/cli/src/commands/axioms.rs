use prefaxiom::axioms::{evaluate, AxiomReport, CheckOptions, Witness};
use prefaxiom::rules::TiePolicy;
use prefaxiom::CandidateSet;
use serde_json::{json, Value};

use super::rank::{apply_rule, describe};
use super::{epsilon_text, load_profile, parse_axioms, parse_epsilon, parse_rule};
use crate::args::AxiomsArgs;
use crate::report::{fmt_float, Report, Table};
use crate::{CliError, Finished, EXIT_OK, EXIT_VIOLATION};

pub(crate) fn witness_text(w: &Witness, names: &CandidateSet) -> String {
    match w {
        Witness::Pair { winner, loser } => {
            format!(
                "{} must rank above {}",
                names.name(*winner),
                names.name(*loser)
            )
        }
        Witness::Candidate { candidate } => {
            format!("{} must be the unique top", names.name(*candidate))
        }
        Witness::Ranking { expected } => format!(
            "expected {}",
            expected
                .iter()
                .map(|&k| names.name(k))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
        Witness::Gap { i, j, gap } => format!(
            "p({}) and p({}) differ by {}",
            names.name(*i),
            names.name(*j),
            fmt_float(*gap)
        ),
        Witness::Distribution {
            candidate,
            expected,
            found,
        } => format!(
            "p({}) = {} but should be {}",
            names.name(*candidate),
            fmt_float(*found),
            fmt_float(*expected)
        ),
    }
}

pub(crate) fn verdict(report: &AxiomReport) -> &'static str {
    match (report.applicable, report.satisfied) {
        (false, _) => "vacuous",
        (true, true) => "satisfied",
        (true, false) => "violated",
    }
}

pub(crate) fn report_json(report: &AxiomReport) -> Value {
    serde_json::to_value(report).expect("axiom reports serialize")
}

pub fn run(args: &AxiomsArgs) -> Result<Finished, CliError> {
    let profile = load_profile(&args.input)?;
    let names = profile.candidates();
    let rule = parse_rule(&args.rule)?;
    let axioms = parse_axioms(&args.checks)?;
    let gpm_epsilon = parse_epsilon(&args.epsilon)?;
    let target_epsilon = parse_epsilon(&args.target_epsilon)?;
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(CliError::usage("--tol must be non-negative"));
    }
    let opts = CheckOptions {
        tol: args.tol,
        target_epsilon: target_epsilon.clone(),
        gpm_epsilon: gpm_epsilon.clone(),
        ..CheckOptions::default()
    };

    let mut report = Report::new("axioms", format!("Axiom audit of {rule}"));
    report
        .param("input", args.input.display().to_string())
        .param("rule", rule.name())
        .param(
            "checks",
            axioms.iter().map(|a| a.name()).collect::<Vec<_>>(),
        )
        .param("tol", args.tol)
        .param("epsilon", epsilon_text(&gpm_epsilon))
        .param("target_epsilon", epsilon_text(&target_epsilon));

    let output = match apply_rule(&profile, rule, TiePolicy::HalfPoint, &gpm_epsilon) {
        Ok(out) => Some(describe(&mut report, &profile, &out)),
        Err(e) if e.code == crate::EXIT_FAILURE => {
            report.note(format!("The rule is undefined on this profile: {e}."));
            None
        }
        Err(e) => return Err(e),
    };

    let mut table = Table::new("axioms", &["axiom", "verdict", "witness"]);
    let mut rows = Vec::new();
    let mut violated = false;
    for axiom in axioms {
        let (status, witness, json_report) =
            if axiom.is_distributional() && !rule.is_probabilistic() {
                ("skipped", String::new(), Value::Null)
            } else {
                match evaluate(rule, axiom, &profile, &opts)? {
                    None => ("undefined", String::new(), Value::Null),
                    Some(r) => {
                        violated |= !r.satisfied;
                        let w = r
                            .witness
                            .as_ref()
                            .map(|w| witness_text(w, names))
                            .unwrap_or_default();
                        (verdict(&r), w, report_json(&r))
                    }
                }
            };
        table.row(vec![
            axiom.name().to_string(),
            status.to_string(),
            witness.clone(),
        ]);
        rows.push(json!({
            "axiom": axiom.name(),
            "verdict": status,
            "report": json_report,
        }));
    }
    report.table(table);
    report.note(if violated {
        "At least one applicable axiom is violated."
    } else {
        "Every applicable axiom holds."
    });
    report.result = json!({
        "output": output,
        "checks": rows,
        "all_passed": !violated,
    });
    Ok(Finished {
        report,
        code: if violated { EXIT_VIOLATION } else { EXIT_OK },
    })
}
