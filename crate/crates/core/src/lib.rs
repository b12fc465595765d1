//! Positive model theory at desk scale: many-sorted syntax, finite
//! structures, bounded type spaces, geometric normal forms, geometric
//! Morleyisation and existential forcing.
//!
//! Every semantic notion is computed relative to an explicit finite
//! [`UniverseClass`] of finite structures.

pub mod corpus;
pub mod error;
pub mod forcing;
pub mod geometric;
pub mod limits;
pub mod logic;
pub mod morley;
pub mod semantics;
pub mod text;
pub mod types;

pub use error::{Error, Result};
pub use limits::Limits;
pub use logic::{
    canonicalize, classify, depth, enumerate_constructible, enumerate_first_order,
    enumerate_positive, substitute, Connective, Formula, FragmentVerdict, Signature, Sym, Term,
    Theory, TheoryKind, Var,
};
pub use semantics::{FiniteStructure, Homomorphism, UniverseClass};
