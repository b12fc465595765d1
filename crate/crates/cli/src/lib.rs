//! Command-line orchestration.

pub mod args;
mod commands;
mod load;
pub mod report;
pub mod suite;

use clap::Parser;

use args::{Cli, Command};
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] poslog::Error),
}

impl CliError {
    /// 2 for bad input, 3 for an exhausted resource ceiling, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use poslog::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Parse(_)
                | E::IllSorted { .. }
                | E::SortMismatch { .. }
                | E::Undeclared { .. }
                | E::InvalidSignature { .. }
                | E::SignatureMismatch { .. }
                | E::NotInClass { .. }
                | E::TupleMismatch { .. } => 2,
                E::ResourceCeiling { .. } => 3,
                _ => 1,
            },
        }
    }
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let format = cli.config.format;
    match dispatch(&cli) {
        Err(e) => Outcome::error(e.exit_code(), e),
        Ok(r) => match r.render(format) {
            None => Outcome::error(
                2,
                format!("`{}` has no {format:?} output", r.command).to_lowercase(),
            ),
            Some(stdout) => Outcome {
                code: if r.passed { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            },
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Classify { formula } => commands::classify_cmd(cfg, formula),
        Command::Dnf { formula } => commands::dnf_cmd(cfg, formula),
        Command::Typespace => commands::typespace_cmd(cfg),
        Command::Resultant { formula } => commands::resultant_cmd(cfg, formula),
        Command::Pmc => commands::pmc_cmd(cfg),
        Command::Pec => commands::pec_cmd(cfg),
        Command::Morleyize => commands::morleyize_cmd(cfg),
        Command::VerifyMorley { structure } => commands::verify_morley_cmd(cfg, structure),
        Command::Forcing { command } => commands::forcing_cmd(cfg, command),
        Command::Karp { left, right } => commands::karp_cmd(cfg, left, right),
        Command::CheckSuite => suite::check_suite(cfg),
    }
}
