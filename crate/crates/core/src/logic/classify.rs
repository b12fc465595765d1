//! Fragment membership by structural recursion.

use std::collections::BTreeSet;

use super::syntax::{Formula, Signature, TheoryKind};
use crate::error::Result;

/// Membership flags for the syntactic fragments.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct FragmentVerdict {
    pub positive: bool,
    pub geometric: bool,
    pub normal_geometric: bool,
    pub constructible: bool,
    pub h_universal_basic: bool,
    pub h_inductive_basic: bool,
    pub g_inductive_basic: bool,
    pub first_order: bool,
}

impl FragmentVerdict {
    /// Names of the set flags, in declaration order.
    pub fn labels(&self) -> Vec<&'static str> {
        let flags = [
            (self.positive, "positive"),
            (self.geometric, "geometric"),
            (self.normal_geometric, "normal-geometric"),
            (self.constructible, "constructible"),
            (self.h_universal_basic, "h-universal-basic"),
            (self.h_inductive_basic, "h-inductive-basic"),
            (self.g_inductive_basic, "g-inductive-basic"),
            (self.first_order, "first-order"),
        ];
        flags.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect()
    }
}

/// Classifies a well-sorted formula.
pub fn classify(sig: &Signature, f: &Formula) -> Result<FragmentVerdict> {
    sig.check(f)?;
    Ok(classify_unchecked(f))
}

/// Classification without the sort check.
pub fn classify_unchecked(f: &Formula) -> FragmentVerdict {
    let positive = is_positive(f);
    let (hu, hi, gi) = basic_shape(f);
    FragmentVerdict {
        positive,
        // Every desk-scale disjunction is finite, so L^g and L+ coincide.
        geometric: positive,
        normal_geometric: is_normal(f),
        constructible: is_constructible(f),
        h_universal_basic: hu,
        h_inductive_basic: hi,
        g_inductive_basic: gi,
        first_order: true,
    }
}

pub fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Atom(..) => true,
        Formula::And(cs) | Formula::Or(cs) => cs.iter().all(is_positive),
        Formula::Exists(_, b) => is_positive(b),
        Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => false,
    }
}

pub fn is_geometric(f: &Formula) -> bool {
    is_positive(f)
}

/// Existential prefix over a conjunction of atoms.
pub fn is_pp(f: &Formula) -> bool {
    match f {
        Formula::Exists(_, b) => is_pp(b),
        Formula::And(cs) => cs.iter().all(Formula::is_atomic),
        other => other.is_atomic(),
    }
}

pub fn is_normal(f: &Formula) -> bool {
    match f {
        Formula::Or(cs) => cs.iter().all(is_pp),
        other => is_pp(other),
    }
}

pub fn is_constructible(f: &Formula) -> bool {
    if is_positive(f) {
        return true;
    }
    match f {
        Formula::And(cs) | Formula::Or(cs) => cs.iter().all(is_constructible),
        Formula::Not(c) => is_constructible(c),
        Formula::Implies(a, b) => is_constructible(a) && is_constructible(b),
        _ => false,
    }
}

/// `(h-universal, h-inductive, g-inductive)` shape flags. A bare positive
/// matrix counts as `true -> matrix`.
fn basic_shape(f: &Formula) -> (bool, bool, bool) {
    if !f.is_sentence() {
        return (false, false, false);
    }
    let mut body = f;
    while let Formula::Forall(_, b) = body {
        body = b;
    }
    match body {
        Formula::Implies(a, b) => {
            let pos = is_positive(a) && is_positive(b);
            let geo = is_geometric(a) && is_geometric(b);
            (pos && **b == Formula::False, pos, geo)
        }
        other => {
            let pos = is_positive(other);
            (*other == Formula::False, pos, is_geometric(other))
        }
    }
}

/// Most specific kind containing every sentence.
pub fn infer_kind(sentences: &BTreeSet<Formula>) -> TheoryKind {
    let vs: Vec<FragmentVerdict> = sentences.iter().map(classify_unchecked).collect();
    if vs.iter().all(|v| v.h_universal_basic) {
        TheoryKind::HUniversal
    } else if vs.iter().all(|v| v.h_inductive_basic) {
        TheoryKind::HInductive
    } else if vs.iter().all(|v| v.g_inductive_basic) {
        TheoryKind::GInductive
    } else {
        TheoryKind::Unrestricted
    }
}
