//! Bounded positive types and their spaces, relative to a class.
//!
//! A bounded type in variables `x` at depth `d` is the set of enumerated
//! positive formulas of depth `<= d` true of a tuple. A space collects the
//! bounded types realized in pec members of the class; finite set algebra
//! over the basic sets `[phi]` stands in for both topologies.

mod constructible;
mod export;
mod resultant;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::{
    canonicalize, depth, enumerate_constructible, enumerate_positive, Formula, Signature, Theory,
    Var,
};
use crate::semantics::eval::sorting;
use crate::semantics::{eval_at, FiniteStructure, UniverseClass};

pub use constructible::{
    constructible_eval, constructible_resultant, CaseReport, ConstructibleResolver,
    ConstructibleResultant, ConstructibleSet, InductionCase,
};
pub(crate) use resultant::ClassExtensions;
pub use resultant::{
    hausdorff_witness, pmc_check, resultant, resultant_in, spectral_complement_cover, CoverReport,
    CoverStatus, PmcReport, ResultantSet, Separation,
};

/// A canonical, sorted set of formulas in fixed variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Supply {
    pub vars: Vec<Var>,
    pub depth: usize,
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
}

impl Supply {
    pub fn positive(sig: &Signature, vars: &[Var], d: usize, limits: Limits) -> Result<Self> {
        Ok(Self::from_sorted(
            vars,
            d,
            enumerate_positive(sig, vars, d, limits)?,
        ))
    }

    pub fn constructible(sig: &Signature, vars: &[Var], d: usize, limits: Limits) -> Result<Self> {
        Ok(Self::from_sorted(
            vars,
            d,
            enumerate_constructible(sig, vars, d, limits)?,
        ))
    }

    /// Canonicalizes, sorts and deduplicates `formulas`.
    pub fn from_formulas(
        vars: &[Var],
        d: usize,
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Self {
        let set: BTreeSet<Formula> = formulas.into_iter().map(|f| canonicalize(&f)).collect();
        Self::from_sorted(vars, d, set.into_iter().collect())
    }

    fn from_sorted(vars: &[Var], d: usize, formulas: Vec<Formula>) -> Self {
        let index = formulas
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        Supply {
            vars: vars.to_vec(),
            depth: d,
            formulas,
            index,
        }
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn get(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    /// Index of the canonical form of `f`.
    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.index
            .get(f)
            .or_else(|| self.index.get(&canonicalize(f)))
            .copied()
    }

    /// The formulas true of `tuple` in `m`.
    pub fn profile(&self, m: &FiniteStructure, tuple: &[usize]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for (i, f) in self.formulas.iter().enumerate() {
            if eval_at(m, f, &self.vars, tuple) {
                bits.insert(i);
            }
        }
        bits
    }
}

/// A tuple of a named structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Realization {
    pub structure: String,
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct BoundedPositiveType {
    pub vars: Vec<Var>,
    pub depth: usize,
    pub formulas: BTreeSet<Formula>,
    /// Membership over the supply the type was computed from.
    pub bits: FixedBitSet,
    /// Every realization found, in discovery order; the first is canonical.
    pub realizations: Vec<Realization>,
}

impl PartialEq for BoundedPositiveType {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.depth == other.depth && self.formulas == other.formulas
    }
}

impl BoundedPositiveType {
    fn from_bits(supply: &Supply, bits: FixedBitSet, realization: Realization) -> Self {
        BoundedPositiveType {
            vars: supply.vars.clone(),
            depth: supply.depth,
            formulas: bits.ones().map(|i| supply.get(i).clone()).collect(),
            bits,
            realizations: vec![realization],
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f) || self.formulas.contains(&canonicalize(f))
    }
}

/// The bounded positive type of `tuple` in `m`.
pub fn tp_pos(
    m: &FiniteStructure,
    vars: &[Var],
    tuple: &[usize],
    d: usize,
    limits: Limits,
) -> Result<BoundedPositiveType> {
    check_tuple(m, vars, tuple)?;
    let supply = Supply::positive(&m.signature, vars, d, limits)?;
    let bits = supply.profile(m, tuple);
    Ok(BoundedPositiveType::from_bits(
        &supply,
        bits,
        Realization {
            structure: m.name.clone(),
            tuple: tuple.to_vec(),
        },
    ))
}

fn check_tuple(m: &FiniteStructure, vars: &[Var], tuple: &[usize]) -> Result<()> {
    if vars.len() != tuple.len() {
        return Err(Error::TupleMismatch(format!(
            "{} variables but {} elements",
            vars.len(),
            tuple.len()
        )));
    }
    for (v, &e) in vars.iter().zip(tuple) {
        if e >= m.size(&v.sort) {
            return Err(Error::TupleMismatch(format!(
                "element {e} out of range for sort {} of `{}`",
                v.sort, m.name
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct BoundedTypeSpace {
    pub theory: Option<Arc<Theory>>,
    pub class: Arc<UniverseClass>,
    pub supply: Arc<Supply>,
    /// Types in order of first realization, scanning pec members in class
    /// order and their tuples lexicographically.
    pub types: Vec<BoundedPositiveType>,
}

impl BoundedTypeSpace {
    pub fn vars(&self) -> &[Var] {
        &self.supply.vars
    }

    pub fn depth(&self) -> usize {
        self.supply.depth
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn whole(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn complement(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut s = set.clone();
        s.toggle_range(..);
        s
    }

    /// `[phi]` for the supply formula at `i`.
    pub fn basic_set_at(&self, i: usize) -> FixedBitSet {
        let mut s = self.empty_set();
        for (k, p) in self.types.iter().enumerate() {
            if p.bits.contains(i) {
                s.insert(k);
            }
        }
        s
    }

    /// `[phi]`. Formulas outside the supply are evaluated at each type's
    /// canonical realization.
    pub fn basic_set(&self, phi: &Formula) -> FixedBitSet {
        if let Some(i) = self.supply.position(phi) {
            return self.basic_set_at(i);
        }
        let mut s = self.empty_set();
        for (k, p) in self.types.iter().enumerate() {
            let r = &p.realizations[0];
            if eval_at(self.structure(r), phi, self.vars(), &r.tuple) {
                s.insert(k);
            }
        }
        s
    }

    pub fn structure(&self, r: &Realization) -> &FiniteStructure {
        self.class
            .member(&r.structure)
            .expect("realization in a class member")
    }

    /// Index of the type realized by `tuple` in the member `name`.
    pub fn type_of(&self, name: &str, tuple: &[usize]) -> Option<usize> {
        let m = self.class.member(name)?;
        let bits = self.supply.profile(m, tuple);
        self.types.iter().position(|p| p.bits == bits)
    }

    /// Every realization, over all types, with its type index.
    pub fn realizations(&self) -> impl Iterator<Item = (usize, &Realization)> {
        self.types
            .iter()
            .enumerate()
            .flat_map(|(k, p)| p.realizations.iter().map(move |r| (k, r)))
    }
}

/// The space of bounded positive types in `vars` at depth `d` realized in
/// pec members of `class`.
pub fn type_space(
    class: &UniverseClass,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<BoundedTypeSpace> {
    let supply = Supply::positive(&class.signature, vars, d, limits)?;
    type_space_over(class, Arc::new(supply))
}

/// As [`type_space`] over a given positive supply.
pub fn type_space_over(class: &UniverseClass, supply: Arc<Supply>) -> Result<BoundedTypeSpace> {
    let pec = class.pec_members();
    if pec.is_empty() {
        return Err(Error::EmptyPositiveClass);
    }
    let sorts = sorting(&supply.vars);
    let mut types: Vec<BoundedPositiveType> = Vec::new();
    let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
    for m in pec {
        for t in m.tuples(&sorts) {
            let bits = supply.profile(m, &t);
            let r = Realization {
                structure: m.name.clone(),
                tuple: t,
            };
            match seen.get(&bits) {
                Some(&k) => types[k].realizations.push(r),
                None => {
                    seen.insert(bits.clone(), types.len());
                    types.push(BoundedPositiveType::from_bits(&supply, bits, r));
                }
            }
        }
    }
    Ok(BoundedTypeSpace {
        theory: class.theory.clone(),
        class: Arc::new(class.clone()),
        supply,
        types,
    })
}

/// Supply formulas ordered by depth, then canonically.
pub(crate) fn by_depth(supply: &Supply) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..supply.len()).collect();
    idx.sort_by_key(|&i| depth(supply.get(i)));
    idx
}

#[cfg(test)]
mod tests;
