//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "poslog",
    version,
    about = "Positive model theory on finite classes of finite structures"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Bounds, inputs and output format shared by every subcommand. All
/// algorithms are deterministic; there is no seed.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Theory file (`.plt`); shipped corpus names such as `t_lo.plt` also work.
    #[arg(long, global = true)]
    pub theory: Option<PathBuf>,
    /// Class file (`.pls`); shipped corpus names such as `chains3.pls` also work.
    #[arg(long, global = true)]
    pub class: Option<PathBuf>,
    /// Fragment seed file for `morleyize` and `verify-morley`.
    #[arg(long, global = true)]
    pub fragment: Option<PathBuf>,
    /// Formula depth bound.
    #[arg(long, global = true, default_value_t = 1)]
    pub depth: usize,
    /// Children per generated `And`/`Or` node.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub width_cap: Option<u64>,
    /// Count ceiling for every enumeration.
    #[arg(long, global = true, env = "POSLOG_CEILING", value_parser = clap::value_parser!(u64).range(1..))]
    pub ceiling: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Member used to read non-positive formulas in forcing.
    #[arg(long, global = true)]
    pub existential_member: Option<String>,
    /// Comma-separated tuple variables, `name` or `name:Sort`.
    #[arg(long, global = true, default_value = "x,y")]
    pub vars: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Syntactic fragments a formula belongs to.
    Classify { formula: String },
    /// Disjunction of positive primitive formulas equivalent to a geometric formula.
    Dnf { formula: String },
    /// Bounded positive type space of the class.
    Typespace,
    /// Bounded resultant of a positive formula and its complement cover.
    Resultant { formula: String },
    /// Complement assignment for positive model completeness.
    Pmc,
    /// Positively existentially closed members of the class.
    Pec,
    /// Geometric Morleyisation of the theory over the fragment.
    Morleyize,
    /// Expansion and reduct checks for a structure (class member or file).
    VerifyMorley { structure: String },
    /// Existential forcing on the class.
    Forcing {
        #[command(subcommand)]
        command: ForcingCommand,
    },
    /// Back-and-forth equivalence of two structures.
    Karp { left: String, right: String },
    /// Every invariant suite over the shipped corpus.
    CheckSuite,
}

#[derive(Debug, Subcommand)]
pub enum ForcingCommand {
    /// Whether a member forces a formula at a tuple.
    Check {
        member: String,
        formula: String,
        /// Comma-separated element names, one per variable.
        #[arg(long)]
        tuple: String,
    },
    /// Whether satisfaction and forcing agree in a member.
    Generic { member: String },
    /// Whether a member realizes every partial positive type of its continuations.
    Existential { member: String },
    /// Back-and-forth equivalence of two structures.
    Karp { left: String, right: String },
}
