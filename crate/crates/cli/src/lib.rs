//! Experiment harness for the distributed QUBO solver: instance
//! generation, solve campaigns, hyperparameter sweeps, and per-phase
//! timing profiles, with CSV/JSON output.
//!
//! The binary is a thin shell over this library; the campaign drivers in
//! [`experiment`] are public so integration tests exercise the exact code
//! the commands run.

pub mod args;
pub mod commands;
pub mod experiment;
pub mod report;
pub mod spec;

use clap::Parser;
use thiserror::Error;

/// Process-level failure classes: configuration mistakes exit 1, runtime
/// failures exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl ToString) -> Self {
        CliError::Config(msg.to_string())
    }

    pub fn runtime(msg: impl ToString) -> Self {
        CliError::Runtime(msg.to_string())
    }

    /// Classify an orchestrator error: anything rejected up front is a
    /// configuration problem; a run that started and died is a runtime one.
    pub fn from_run(e: dqaoa_orchestrator::RunError) -> Self {
        use dqaoa_orchestrator::RunError::*;
        match e {
            Aborted { .. } => CliError::Runtime(e.to_string()),
            BadConfig(_) | Decompose(_) | BadReference(_) => CliError::Config(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Parse, dispatch, and map the outcome to an exit code: 0 success (help
/// and version included), 1 configuration error (usage errors included),
/// 2 runtime failure.
pub fn cli_main() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let _ = env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or("warn"),
    )
    .format_timestamp(None)
    .try_init();

    let result = match &cli.command {
        args::Command::Generate(a) => commands::cmd_generate(a),
        args::Command::Solve(a) => commands::cmd_solve(a),
        args::Command::Sweep(a) => commands::cmd_sweep(a),
        args::Command::Profile(a) => commands::cmd_profile(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}: {e}",
                match e {
                    CliError::Config(_) => "configuration error",
                    CliError::Runtime(_) => "error",
                }
            );
            e.exit_code()
        }
    }
}
