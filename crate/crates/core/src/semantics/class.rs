use std::sync::{Arc, OnceLock};

use super::eval::satisfies;
use super::pec::is_pec_index;
use super::structure::FiniteStructure;
use crate::error::{Error, Result};
use crate::logic::{Signature, Theory};

/// Explicit finite class of finite structures over one signature. Every
/// semantic notion computed against a class is relative to it.
#[derive(Clone, Debug)]
pub struct UniverseClass {
    pub name: String,
    pub signature: Arc<Signature>,
    pub members: Vec<FiniteStructure>,
    pub theory: Option<Arc<Theory>>,
    pec: OnceLock<Vec<bool>>,
}

impl PartialEq for UniverseClass {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.signature == other.signature
            && self.members == other.members
            && self.theory == other.theory
    }
}

pub(crate) fn same_symbols(a: &Signature, b: &Signature) -> bool {
    a.sorts() == b.sorts()
        && a.relations() == b.relations()
        && a.functions() == b.functions()
        && a.constants() == b.constants()
}

impl UniverseClass {
    /// Checks that members share the signature, have distinct names, and
    /// satisfy every axiom of `theory` when one is attached.
    pub fn new(
        name: &str,
        signature: Arc<Signature>,
        members: Vec<FiniteStructure>,
        theory: Option<Arc<Theory>>,
    ) -> Result<Self> {
        let mut names = std::collections::BTreeSet::new();
        for m in &members {
            if !same_symbols(&m.signature, &signature) {
                return Err(Error::SignatureMismatch(format!(
                    "member `{}` is not over the class signature",
                    m.name
                )));
            }
            if !names.insert(m.name.clone()) {
                return Err(Error::Precondition(format!(
                    "member `{}` listed twice",
                    m.name
                )));
            }
        }
        if let Some(t) = &theory {
            if !same_symbols(&t.signature, &signature) {
                return Err(Error::SignatureMismatch(format!(
                    "theory `{}` is not over the class signature",
                    t.name
                )));
            }
            for m in &members {
                if let Some(ax) = t.sentences.iter().find(|ax| !satisfies(m, ax)) {
                    return Err(Error::NotAModel {
                        structure: m.name.clone(),
                        axiom: crate::text::print_formula(&signature, ax),
                    });
                }
            }
        }
        let members = members
            .into_iter()
            .map(|m| m.with_signature(signature.clone()))
            .collect();
        Ok(UniverseClass {
            name: name.to_string(),
            signature,
            members,
            theory,
            pec: OnceLock::new(),
        })
    }

    /// Same members, checked against `theory`.
    pub fn with_theory(&self, theory: Arc<Theory>) -> Result<Self> {
        UniverseClass::new(
            &self.name,
            self.signature.clone(),
            self.members.clone(),
            Some(theory),
        )
    }

    pub fn member(&self, name: &str) -> Option<&FiniteStructure> {
        self.members.iter().find(|m| m.name == name)
    }

    pub fn index_of(&self, m: &FiniteStructure) -> Result<usize> {
        self.members
            .iter()
            .position(|n| n.name == m.name && n.carriers() == m.carriers() && same_content(n, m))
            .ok_or_else(|| Error::NotInClass(m.name.clone()))
    }

    /// Per-member pec flags, computed once.
    pub fn pec_flags(&self) -> &[bool] {
        self.pec.get_or_init(|| {
            (0..self.members.len())
                .map(|i| is_pec_index(self, i).map(|v| v.pec).unwrap_or(false))
                .collect()
        })
    }

    pub fn pec_members(&self) -> Vec<&FiniteStructure> {
        self.members
            .iter()
            .zip(self.pec_flags())
            .filter(|(_, &p)| p)
            .map(|(m, _)| m)
            .collect()
    }
}

fn same_content(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    a.signature
        .relations()
        .keys()
        .all(|r| a.relation(r) == b.relation(r))
        && a.constants() == b.constants()
        && a.signature
            .functions()
            .keys()
            .all(|f| a.function_table(f) == b.function_table(f))
}
