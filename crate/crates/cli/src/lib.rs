//! The `prefaxiom` command line tool as a library, so tests can drive it
//! in-process.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 malformed profile,
//! 3 disconnected comparison graph, 4 axiom violation (`axioms` only),
//! 5 search space too large.

pub mod args;
mod commands;
pub mod report;

use std::ffi::OsString;
use std::fmt;

use clap::error::ErrorKind;
use clap::Parser;
use prefaxiom::Error;

use args::{Cli, Command};
use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_DISCONNECTED: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_SPACE_TOO_LARGE: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_FAILURE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Schema { .. } => EXIT_SCHEMA,
            Error::DisconnectedGraph => EXIT_DISCONNECTED,
            Error::SpaceTooLarge { .. } => EXIT_SPACE_TOO_LARGE,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e.to_string())
    }
}

/// What a finished invocation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// A command's report plus the exit code it asks for.
pub(crate) struct Finished {
    pub report: Report,
    pub code: i32,
}

impl From<Report> for Finished {
    fn from(report: Report) -> Self {
        Self {
            report,
            code: EXIT_OK,
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_FAILURE,
                },
            };
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            return failure(CliError::usage(format!(
                "cannot start {} workers: {e}",
                cli.jobs
            )))
        }
    };
    let result = pool.install(|| dispatch(&cli.command));
    match result {
        Ok(done) => Outcome {
            stdout: done.report.render(cli.format),
            stderr: String::new(),
            code: done.code,
        },
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: e.code,
    }
}

fn dispatch(command: &Command) -> Result<Finished, CliError> {
    match command {
        Command::Tally(a) => commands::tally::run(a).map(Into::into),
        Command::Rank(a) => commands::rank::run(a).map(Into::into),
        Command::Axioms(a) => commands::axioms::run(a),
        Command::Gpmd(a) => commands::gpmd::run(a).map(Into::into),
        Command::Search(a) => commands::search::run(a).map(Into::into),
        Command::ExperimentCycles(a) => commands::cycles::run(a).map(Into::into),
        Command::Demo(a) => commands::demo::run(a).map(Into::into),
    }
}
