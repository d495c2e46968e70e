//! The `ellcert` command line: argument parsing, dispatch and the exit-code
//! contract. `main` is a thin wrapper around [`run`].

mod args;
mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use ellcert::cost::CostError;
use ellcert::phi::BoundError;
use ellcert::planner::PlanError;
use ellcert::testbed::TestbedError;
use ellcert::Precision;

pub use args::{Cli, Command, Format, Rule, RunConfig, Suite};
pub use commands::{CertifyOutput, RuleOutput};

/// Every check passed.
pub const EXIT_PASS: i32 = 0;
/// A certified counterexample or a failed published-value check.
pub const EXIT_FAILURE: i32 = 1;
/// Some comparison stayed undecided at the precision cap.
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// Bad flags, unparsable input, or an input outside a documented limit.
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Failure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => EXIT_PASS,
            Status::Failure => EXIT_FAILURE,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Failure => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Inconclusive { .. } => CliError::Inconclusive(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CostError> for CliError {
    fn from(e: CostError) -> Self {
        match e {
            CostError::Plan(p) => p.into(),
            CostError::Inconclusive(_) => CliError::Inconclusive(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<TestbedError> for CliError {
    fn from(e: TestbedError) -> Self {
        match e {
            TestbedError::Plan(p) => p.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli, out, err) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status, CliError> {
    let policy = Precision::new(cli.run.precision_start, cli.run.precision_cap)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.run.worker_count.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    // Output is buffered so the pool can run the command; it is written once at the end.
    let (result, stdout_buf, stderr_buf) = pool.install(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let r = commands::dispatch(cli, policy, &mut o, &mut e);
        (r, o, e)
    });
    out.write_all(&stdout_buf)?;
    err.write_all(&stderr_buf)?;
    result
}
