//! Finite structures, satisfaction, homomorphisms and closedness relative to
//! an explicit class.

pub mod class;
pub mod eval;
pub mod hom;
pub mod pec;
pub mod structure;

pub use class::UniverseClass;
pub use eval::{eval, eval_at, extension, satisfies, Assignment};
pub use hom::{
    diagram_witness, find_isomorphism, first_hom, for_each_hom, homomorphisms, is_homomorphism,
    is_immersion, is_isomorphic, retraction, Homomorphism, ImmersionVerdict, Witness,
};
pub use pec::{
    continue_to_pec, directed_colimit, is_pec, joint_continuation, tuple_vars, JointContinuation,
    PecCounterexample, PecVerdict,
};
pub use structure::{all_tuples, FiniteStructure};
