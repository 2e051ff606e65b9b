//! Profile documents:
//!
//! ```json
//! {"candidates": ["y1","y2","y3"],
//!  "voters": [{"id": "v1", "ranking": ["y1","y2","y3"]},
//!             {"id": "v2", "comparisons": [["y2","y3"],["y3","y1"]]}]}
//! ```
//!
//! A voter carries exactly one of `ranking` (best first) or `comparisons`
//! (`[winner, loser]` pairs).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Ballot, CandidateSet, Comparison, PreferenceProfile, Ranking, Voter};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    candidates: Vec<String>,
    voters: Vec<RawVoter>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVoter {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ranking: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comparisons: Option<Vec<[String; 2]>>,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        message: message.into(),
    }
}

pub fn parse_profile(bytes: &[u8]) -> Result<PreferenceProfile> {
    let raw: RawProfile = serde_json::from_slice(bytes).map_err(|e| {
        schema(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;

    let candidates = CandidateSet::new(raw.candidates.iter().cloned())
        .map_err(|e| schema("candidates", e.to_string()))?;
    if raw.voters.is_empty() {
        return Err(schema("voters", "at least one voter is required"));
    }

    let lookup = |path: String, label: &str| {
        candidates
            .index_of(label)
            .ok_or_else(|| schema(path, format!("unknown candidate {label:?}")))
    };

    let mut ids = HashSet::new();
    let mut voters = Vec::with_capacity(raw.voters.len());
    for (k, rv) in raw.voters.iter().enumerate() {
        let at = format!("voters[{k}]");
        if !ids.insert(rv.id.as_str()) {
            return Err(schema(
                format!("{at}.id"),
                format!("duplicate voter id {:?}", rv.id),
            ));
        }
        let ballot = match (&rv.ranking, &rv.comparisons) {
            (Some(ranking), None) => {
                let order = ranking
                    .iter()
                    .enumerate()
                    .map(|(i, label)| lookup(format!("{at}.ranking[{i}]"), label))
                    .collect::<Result<Vec<_>>>()?;
                if order.len() != candidates.len() {
                    return Err(schema(
                        format!("{at}.ranking"),
                        format!(
                            "ranking lists {} candidates, expected {}",
                            order.len(),
                            candidates.len()
                        ),
                    ));
                }
                let ranking = Ranking::strict(order)
                    .map_err(|_| schema(format!("{at}.ranking"), "ranking repeats a candidate"))?;
                Ballot::Ranked(ranking)
            }
            (None, Some(pairs)) => {
                let mut seen = HashSet::new();
                let mut out = Vec::with_capacity(pairs.len());
                for (i, [w, l]) in pairs.iter().enumerate() {
                    let path = format!("{at}.comparisons[{i}]");
                    let w = lookup(path.clone(), w)?;
                    let l = lookup(path.clone(), l)?;
                    if w == l {
                        return Err(schema(path, "candidate compared with itself"));
                    }
                    if !seen.insert((w.min(l), w.max(l))) {
                        return Err(schema(path, "pair already judged by this voter"));
                    }
                    out.push(Comparison::new(w, l));
                }
                Ballot::Comparisons(out)
            }
            _ => {
                return Err(schema(
                    at,
                    "voter must carry exactly one of `ranking` or `comparisons`",
                ))
            }
        };
        voters.push(Voter {
            id: rv.id.clone(),
            ballot,
        });
    }
    PreferenceProfile::new(candidates, voters).map_err(|e| schema("voters", e.to_string()))
}

pub fn serialize_profile(profile: &PreferenceProfile) -> Vec<u8> {
    let names = profile.candidates().names();
    let raw = RawProfile {
        candidates: names.to_vec(),
        voters: profile
            .voters()
            .iter()
            .map(|v| match &v.ballot {
                Ballot::Ranked(r) => RawVoter {
                    id: v.id.clone(),
                    ranking: Some(r.order().into_iter().map(|c| names[c].clone()).collect()),
                    comparisons: None,
                },
                Ballot::Comparisons(cs) => RawVoter {
                    id: v.id.clone(),
                    ranking: None,
                    comparisons: Some(
                        cs.iter()
                            .map(|c| [names[c.winner].clone(), names[c.loser].clone()])
                            .collect(),
                    ),
                },
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&raw).expect("profile serializes");
    out.push(b'\n');
    out
}
