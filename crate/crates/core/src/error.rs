use std::fmt;

use thiserror::Error;

use crate::text::ParseDiagnostic;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ill-sorted: {0}")]
    IllSorted(String),
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("{}", DiagnosticList(.0))]
    Parse(Vec<ParseDiagnostic>),
    #[error("resource ceiling exceeded: {what} (limit {limit})")]
    ResourceCeiling { what: String, limit: usize },
    #[error("structure `{0}` is not a member of the class")]
    NotInClass(String),
    #[error("`{0}` has no homomorphism into a positively existentially closed member; the class is not a faithful surrogate for an inductive class")]
    NotContinuable(String),
    #[error("the class has no positively existentially closed member")]
    EmptyPositiveClass,
    #[error("types are indistinguishable at depth {0}")]
    IndistinguishableAtDepth(usize),
    #[error("formula is not geometric: {0}")]
    NonGeometric(String),
    #[error("formula is not constructible: {0}")]
    NonConstructible(String),
    #[error("no existential member available: {0}")]
    NoExistentialMember(String),
    #[error("structure `{structure}` does not satisfy `{axiom}`")]
    NotAModel { structure: String, axiom: String },
    #[error("theory sentence outside the fragment: {0}")]
    FragmentCoverage(String),
    #[error("chain is not composable at link {0}")]
    NonComposable(usize),
    #[error("tuple mismatch: {0}")]
    TupleMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

struct DiagnosticList<'a>(&'a [ParseDiagnostic]);

impl fmt::Display for DiagnosticList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
