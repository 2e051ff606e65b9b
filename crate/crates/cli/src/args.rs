use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "prefaxiom",
    version,
    about = "Audit preference aggregation rules against social-choice axioms"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,

    /// Worker threads for parallel commands (0 = one per core).
    #[arg(long, global = true, env = "PREFAXIOM_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise win counts and proportions.
    Tally(InputArgs),
    /// Aggregate ranking, scores and rewards under one rule.
    Rank(RankArgs),
    /// Run axiom checkers against a rule's output.
    Axioms(AxiomsArgs),
    /// Group preference matching distribution.
    Gpmd(GpmdArgs),
    /// Search a profile space for an axiom violation.
    Search(SearchArgs),
    /// Frequency of profiles without a Condorcet winner.
    ExperimentCycles(CyclesArgs),
    /// Annotated walkthrough of a textbook example.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Profile document, or `-` for stdin.
    pub input: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliTiePolicy {
    HalfPoint,
    StrictOnly,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Profile document, or `-` for stdin.
    pub input: PathBuf,
    /// borda, copeland, mle-standard, mle-copeland, mle-gpm or gpmd-limit.
    #[arg(long)]
    pub rule: String,
    /// Scoring of exact pairwise ties for copeland and mle-copeland.
    #[arg(long, value_enum, default_value_t = CliTiePolicy::HalfPoint)]
    pub tie_policy: CliTiePolicy,
    /// ε of the mle-gpm target: a value in (0, 1/2) or `limit`.
    #[arg(long, default_value = "1/1000")]
    pub epsilon: String,
}

#[derive(Debug, Args)]
pub struct AxiomsArgs {
    /// Profile document, or `-` for stdin.
    pub input: PathBuf,
    #[arg(long)]
    pub rule: String,
    /// `all`, `ordinal`, or a comma separated list of axiom names.
    #[arg(long, default_value = "all")]
    pub checks: String,
    /// Tolerance for distribution comparisons.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// ε of the mle-gpm target.
    #[arg(long, default_value = "1/1000")]
    pub epsilon: String,
    /// ε of the group preference matching reference distribution.
    #[arg(long, default_value = "limit")]
    pub target_epsilon: String,
}

#[derive(Debug, Args)]
pub struct GpmdArgs {
    /// Profile document, or `-` for stdin.
    pub input: PathBuf,
    /// A value in (0, 1/2), e.g. `0.25` or `1/4`, or `limit`.
    #[arg(long, default_value = "1/1000")]
    pub epsilon: String,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub rule: String,
    /// `all`, `ordinal`, or a comma separated list of axiom names.
    #[arg(long)]
    pub axiom: String,
    /// e.g. `exhaustive-complete:n=3,m=3`, `random-complete:n=3,m=4,trials=10000`,
    /// `assumption1:n=4,trials=500`, `assumption1-exhaustive:n=5`.
    #[arg(long)]
    pub space: String,
    /// Required for random spaces.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest exhaustive space to enumerate.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    /// Tolerance for distribution comparisons.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value = "1/1000")]
    pub epsilon: String,
    #[arg(long, default_value = "limit")]
    pub target_epsilon: String,
    /// Write the first counterexample found here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    /// Candidate counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// Voters per profile.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    CondorcetParadox,
    SingleVoterCycle,
    BordaVsCopeland,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
}
