pub mod axioms;
pub mod cycles;
pub mod demo;
pub mod gpmd;
pub mod rank;
pub mod search;
pub mod tally;

use std::io::Read;
use std::path::Path;

use prefaxiom::axioms::{AxiomId, RuleUnderTest};
use prefaxiom::gpmd::EpsilonPolicy;
use prefaxiom::profile::parse_profile;
use prefaxiom::scalar::rational;
use prefaxiom::{CandidateSet, PreferenceProfile, Ranking, Rational, Scalar};
use serde_json::{json, Value};

use crate::report::{fmt_float, num, Table};
use crate::{CliError, EXIT_SCHEMA};

pub(crate) fn load_profile(path: &Path) -> Result<PreferenceProfile, CliError> {
    let shown = path.display();
    let bytes = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::usage(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| CliError::usage(format!("cannot read {shown}: {e}")))?
    };
    parse_profile(&bytes).map_err(|e| CliError::new(EXIT_SCHEMA, format!("{shown}: {e}")))
}

pub(crate) fn parse_rule(s: &str) -> Result<RuleUnderTest, CliError> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = RuleUnderTest::ALL.iter().map(|r| r.name()).collect();
        CliError::usage(format!(
            "unknown rule {s:?}; expected one of {}",
            names.join(", ")
        ))
    })
}

/// `all`, `ordinal`, or a comma separated list (`gpm` abbreviates
/// group-preference-matching).
pub(crate) fn parse_axioms(s: &str) -> Result<Vec<AxiomId>, CliError> {
    match s {
        "all" => return Ok(AxiomId::ALL.to_vec()),
        "ordinal" => return Ok(AxiomId::ORDINAL.to_vec()),
        _ => {}
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let id = match part {
            "gpm" => AxiomId::GroupPreferenceMatching,
            other => other.parse().map_err(|_| {
                let names: Vec<&str> = AxiomId::ALL.iter().map(|a| a.name()).collect();
                CliError::usage(format!(
                    "unknown axiom {other:?}; expected all, ordinal or any of {}",
                    names.join(", ")
                ))
            })?,
        };
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("no axioms selected"));
    }
    Ok(out)
}

/// Exact value of a fraction (`1/4`) or plain decimal (`0.25`).
pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.contains('/') {
        return s.parse().ok();
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 17 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().ok()?;
    Some(rational(num, den))
}

pub(crate) fn parse_epsilon(s: &str) -> Result<EpsilonPolicy<Rational>, CliError> {
    if s == "limit" {
        return Ok(EpsilonPolicy::Limit);
    }
    let eps = parse_rational(s)
        .ok_or_else(|| CliError::usage(format!("epsilon {s:?} is neither a number nor `limit`")))?;
    Ok(EpsilonPolicy::finite(eps)?)
}

pub(crate) fn epsilon_text(policy: &EpsilonPolicy<Rational>) -> String {
    match policy {
        EpsilonPolicy::Limit => "limit".to_string(),
        EpsilonPolicy::Finite(e) => e.to_string(),
    }
}

/// Best first, `>` between indifference classes and `=` within them.
pub(crate) fn ranking_text(ranking: &Ranking, names: &CandidateSet) -> String {
    ranking
        .tiers()
        .iter()
        .map(|tier| {
            tier.iter()
                .map(|&c| names.name(c))
                .collect::<Vec<_>>()
                .join(" = ")
        })
        .collect::<Vec<_>>()
        .join(" > ")
}

pub(crate) fn ranking_json(ranking: &Ranking, names: &CandidateSet) -> Value {
    json!(ranking
        .tiers()
        .iter()
        .map(|tier| tier.iter().map(|&c| names.name(c)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub(crate) fn ratio_f64(r: &Rational) -> f64 {
    r.to_real::<f64>()
}

/// `{"exact": "1/3", "value": 0.333…}` per candidate.
pub(crate) fn exact_json(values: &[Rational]) -> Value {
    json!(values
        .iter()
        .map(|v| json!({"exact": v.to_string(), "value": num(ratio_f64(v))}))
        .collect::<Vec<_>>())
}

pub(crate) fn floats_json(values: &[f64]) -> Value {
    json!(values.iter().map(|&v| num(v)).collect::<Vec<_>>())
}

/// One row per candidate with exact and decimal columns.
pub(crate) fn exact_table(name: &str, names: &CandidateSet, values: &[Rational]) -> Table {
    let mut t = Table::new(name, &["candidate", "exact", "value"]);
    for (i, v) in values.iter().enumerate() {
        t.row(vec![
            names.name(i).to_string(),
            v.to_string(),
            fmt_float(ratio_f64(v)),
        ]);
    }
    t
}

/// One row per candidate, one float column per series.
pub(crate) fn float_table(name: &str, names: &CandidateSet, columns: &[(&str, &[f64])]) -> Table {
    let mut header = vec!["candidate"];
    header.extend(columns.iter().map(|(h, _)| *h));
    let mut t = Table::new(name, &header);
    for i in 0..names.len() {
        let mut row = vec![names.name(i).to_string()];
        row.extend(columns.iter().map(|(_, v)| fmt_float(v[i])));
        t.row(row);
    }
    t
}

/// Square matrix with candidate labels on both axes.
pub(crate) fn matrix_table(
    name: &str,
    names: &CandidateSet,
    cell: impl Fn(usize, usize) -> String,
) -> Table {
    let mut header = vec![""];
    header.extend(names.names().iter().map(String::as_str));
    let mut t = Table::new(name, &header);
    for i in 0..names.len() {
        let mut row = vec![names.name(i).to_string()];
        row.extend((0..names.len()).map(|j| cell(i, j)));
        t.row(row);
    }
    t
}
