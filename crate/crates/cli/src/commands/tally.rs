use prefaxiom::profile::{has_condorcet_cycle, majority_relation, pairs_of};
use prefaxiom::rules::condorcet_winner;
use prefaxiom::PairwiseTally;
use serde_json::{json, Value};

use super::{load_profile, ratio_f64};
use crate::args::InputArgs;
use crate::report::{fmt_float, num, Report, Table};
use crate::CliError;

pub fn run(args: &InputArgs) -> Result<Report, CliError> {
    let profile = load_profile(&args.input)?;
    let names = profile.candidates();
    let tally = PairwiseTally::from_profile(&profile);
    let n = tally.n();

    let mut report = Report::new("tally", "Pairwise tally");
    report
        .param("input", args.input.display().to_string())
        .param("candidates", profile.n())
        .param("voters", profile.m());

    let wins = super::matrix_table("wins", names, |i, j| {
        if i == j {
            "-".into()
        } else {
            tally.wins()[i][j].to_string()
        }
    });
    let props = super::matrix_table("proportions", names, |i, j| match tally.prop_opt(i, j) {
        Some(p) if i != j => p.to_string(),
        _ => "-".into(),
    });

    let mut pairs = Table::new(
        "pairs",
        &["i", "j", "wins_ij", "wins_ji", "p_ij", "p_ij_value"],
    );
    let mut pair_json = Vec::new();
    for (i, j) in pairs_of(n) {
        let p = tally.prop_opt(i, j);
        pairs.row(vec![
            names.name(i).to_string(),
            names.name(j).to_string(),
            tally.wins()[i][j].to_string(),
            tally.wins()[j][i].to_string(),
            p.map_or("undefined".into(), |p| p.to_string()),
            p.map_or("undefined".into(), |p| fmt_float(ratio_f64(p))),
        ]);
        pair_json.push(json!({
            "i": names.name(i),
            "j": names.name(j),
            "wins_ij": tally.wins()[i][j],
            "wins_ji": tally.wins()[j][i],
            "p_ij": p.map(|p| Value::String(p.to_string())).unwrap_or(Value::Null),
            "p_ij_value": p.map(|p| num(ratio_f64(p))).unwrap_or(Value::Null),
        }));
    }

    let winner = condorcet_winner(&tally).ok().flatten();
    let cycle = has_condorcet_cycle(&majority_relation(&tally))
        .ok()
        .flatten();
    match (winner, &cycle) {
        (Some(w), _) => report.note(format!("Condorcet winner: {}.", names.name(w))),
        (None, Some(c)) => {
            let mut path: Vec<&str> = c.iter().map(|&k| names.name(k)).collect();
            path.push(names.name(c[0]));
            report.note(format!("Majority cycle: {}.", path.join(" -> ")))
        }
        (None, None) => report.note("No Condorcet winner."),
    };

    report.result = json!({
        "candidates": names.names(),
        "wins": tally.wins(),
        "proportions": (0..n)
            .map(|i| (0..n).map(|j| match tally.prop_opt(i, j) {
                Some(p) if i != j => Value::String(p.to_string()),
                _ => Value::Null,
            }).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "pairs": pair_json,
        "condorcet_winner": winner.map(|w| names.name(w)),
        "majority_cycle": cycle.map(|c| c.iter().map(|&k| names.name(k).to_string()).collect::<Vec<_>>()),
    });
    report.table(wins).table(props).table(pairs);
    Ok(report)
}
