use prefaxiom::axioms::SearchSpace;
use prefaxiom::rules::condorcet_winner;
use prefaxiom::scalar::rational;
use prefaxiom::{PairwiseTally, Rational};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::ratio_f64;
use crate::args::CyclesArgs;
use crate::report::{fmt_float, num, Report, Table};
use crate::CliError;

/// Largest space enumerated for the exact frequency.
const EXACT_LIMIT: u128 = 1_000_000;

fn lacks_winner(space: &SearchSpace, index: u64) -> Result<bool, CliError> {
    let profile = space.profile_at(index)?;
    Ok(condorcet_winner(&PairwiseTally::from_profile(&profile))?.is_none())
}

fn count(space: &SearchSpace) -> Result<u64, CliError> {
    let size = space.size() as u64;
    (0..size)
        .into_par_iter()
        .map(|i| lacks_winner(space, i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Fraction of all `(n!)^m` profiles without a Condorcet winner, if the
/// space is small enough to enumerate.
pub(crate) fn exact_frequency(n: usize, m: usize) -> Result<Option<Rational>, CliError> {
    let space = SearchSpace::ExhaustiveComplete { n, m };
    if space.size() > EXACT_LIMIT {
        return Ok(None);
    }
    Ok(Some(rational(count(&space)? as i64, space.size() as i64)))
}

pub fn run(args: &CyclesArgs) -> Result<Report, CliError> {
    if args.trials < 100 {
        return Err(CliError::usage("--trials must be at least 100"));
    }
    if args.m == 0 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    if let Some(n) = args.n_list.iter().find(|&&n| n < 2) {
        return Err(CliError::usage(format!("--n-list entry {n} is below 2")));
    }

    let mut report = Report::new("experiment-cycles", "Profiles without a Condorcet winner");
    report
        .param("n_list", args.n_list.clone())
        .param("m", args.m)
        .param("trials", args.trials)
        .param("seed", args.seed);
    report.note(format!(
        "Each trial draws {} independent uniform rankings; standard error is sqrt(f(1-f)/trials).",
        args.m
    ));

    let mut table = Table::new(
        "frequency",
        &[
            "n",
            "no_winner",
            "frequency",
            "std_error",
            "exact",
            "exact_value",
            "z",
        ],
    );
    let mut rows = Vec::new();
    for &n in &args.n_list {
        let space = SearchSpace::RandomComplete {
            n,
            m: args.m,
            trials: args.trials,
            seed: args.seed,
        };
        let hits = count(&space)?;
        let f = hits as f64 / args.trials as f64;
        let se = (f * (1.0 - f) / args.trials as f64).sqrt();
        let exact = exact_frequency(n, args.m)?;
        let exact_value = exact.as_ref().map(ratio_f64);
        let z = exact_value.filter(|_| se > 0.0).map(|e| (f - e) / se);
        table.row(vec![
            n.to_string(),
            hits.to_string(),
            fmt_float(f),
            fmt_float(se),
            exact.as_ref().map_or("-".into(), |e| e.to_string()),
            exact_value.map_or("-".into(), fmt_float),
            z.map_or("-".into(), fmt_float),
        ]);
        rows.push(json!({
            "n": n,
            "no_winner": hits,
            "frequency": num(f),
            "std_error": num(se),
            "exact": exact.as_ref().map(|e| Value::String(e.to_string())).unwrap_or(Value::Null),
            "exact_value": exact_value.map(num).unwrap_or(Value::Null),
            "z": z.map(num).unwrap_or(Value::Null),
        }));
    }
    report.table(table);
    report.result = json!({ "rows": rows });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(exact_frequency(3, 3).unwrap(), Some(rational(1, 18)));
        assert_eq!(exact_frequency(3, 1).unwrap(), Some(rational(0, 1)));
        // Two voters with different top choices never produce a winner.
        assert_eq!(exact_frequency(2, 2).unwrap(), Some(rational(1, 2)));
        assert_eq!(exact_frequency(10, 3).unwrap(), None);
    }
}
