use prefaxiom::gpmd::{gpmd, pm_geometric, EpsilonPolicy};
use serde_json::json;

use super::{epsilon_text, exact_json, exact_table, load_profile, parse_epsilon, ranking_text};
use crate::args::GpmdArgs;
use crate::report::Report;
use crate::CliError;

pub fn run(args: &GpmdArgs) -> Result<Report, CliError> {
    let profile = load_profile(&args.input)?;
    let names = profile.candidates();
    let policy = parse_epsilon(&args.epsilon)?;
    let dist = gpmd(&profile, &policy)?;

    let mut report = Report::new("gpmd", "Group preference matching distribution");
    report
        .param("input", args.input.display().to_string())
        .param("epsilon", epsilon_text(&policy))
        .param("voters", profile.m());
    report.note(match &policy {
        EpsilonPolicy::Limit => {
            "Limit: the share of voters ranking each candidate first.".to_string()
        }
        EpsilonPolicy::Finite(e) => format!(
            "Average over voters of the matching distribution of each ranking with epsilon {e}."
        ),
    });

    let mut voters = Vec::new();
    if let EpsilonPolicy::Finite(eps) = &policy {
        let rankings = profile.rankings()?;
        for (voter, ranking) in profile.voters().iter().zip(rankings) {
            let d = pm_geometric(ranking, eps)?;
            voters.push(json!({
                "voter": voter.id,
                "ranking": ranking_text(ranking, names),
                "distribution": exact_json(d.values()),
            }));
        }
    }
    report.table(exact_table("distribution", names, dist.values()));
    report.result = json!({
        "candidates": names.names(),
        "distribution": exact_json(dist.values()),
        "voters": voters,
    });
    Ok(report)
}
