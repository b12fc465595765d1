//! Syntax of the language, fragment classification and formula transforms.

pub mod classify;
pub mod enumerate;
pub mod syntax;
pub mod transform;

pub use classify::{classify, classify_unchecked, FragmentVerdict};
pub use enumerate::{enumerate_constructible, enumerate_first_order, enumerate_positive};
pub use syntax::{Connective, Formula, Signature, Sym, Term, Theory, TheoryKind, Var};
pub use transform::{canonicalize, depth, substitute};
