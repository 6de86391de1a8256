//! Command-line front end for the barbnet toolkit.
//!
//! Parsing and execution are ordinary library functions so every invocation
//! is testable without spawning a process: [`parse_invocation`] turns argv
//! plus an optional config file into a fully resolved [`RunPlan`], and
//! [`execute`] runs the plan and writes its artifacts and run manifest.
//! [`run_cli`] wires both to the process exit-code contract: 0 success,
//! 1 runtime failure, 2 usage or validation error.

mod exec;
mod plan;

pub use exec::{execute, RunOutcome};
pub use plan::{
    parse_invocation, CommandPlan, EvaluatePlan, GraphPlan, HarvestPlan, IngestPlan, ModelChoice,
    PipelinePlan, ReportPlan, RunPlan, TrainPlan,
};

/// Errors mapped onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad argv: unknown command or flag. Exit 2.
    #[error("{0}")]
    Usage(String),
    /// Bad configuration: missing input, value out of bounds. Exit 2.
    #[error("{0}")]
    Validation(String),
    /// Failure while executing a valid plan, prefixed with the module that
    /// raised it. Exit 1.
    #[error("{module}: {message}")]
    Runtime { module: &'static str, message: String },
    /// --help or --version output. Exit 0.
    #[error("{0}")]
    Help(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => 2,
            CliError::Runtime { .. } => 1,
            CliError::Help(_) => 0,
        }
    }

    pub(crate) fn runtime(module: &'static str, err: impl std::fmt::Display) -> Self {
        CliError::Runtime { module, message: err.to_string() }
    }
}

/// Parse and execute one invocation, returning the process exit code.
/// Diagnostics go to stderr; the success summary goes to stdout.
pub fn run_cli<S: AsRef<str>>(argv: &[S]) -> i32 {
    let plan = match parse_invocation(argv, None) {
        Ok(plan) => plan,
        Err(e) => return report(e),
    };
    match execute(&plan) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            0
        }
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> i32 {
    match &e {
        CliError::Help(text) => println!("{text}"),
        other => eprintln!("error: {other}"),
    }
    e.exit_code()
}
