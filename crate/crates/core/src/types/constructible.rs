//! Constructible sets of a type space and constructible resultants.

use fixedbitset::FixedBitSet;

use super::resultant::CoverReport;
use super::{BoundedTypeSpace, Supply};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::classify::{is_constructible, is_positive};
use crate::logic::{canonicalize, Formula};
use crate::semantics::eval::sorting;
use crate::semantics::eval_at;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructibleSet {
    pub formula: Formula,
    /// Types whose canonical realization satisfies the formula.
    pub extension: FixedBitSet,
    /// Types whose realizations disagree on the formula: the depth is too
    /// small for the formula to define a subset of the space.
    pub disagreements: Vec<usize>,
}

impl ConstructibleSet {
    pub fn well_defined(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn check(space: &BoundedTypeSpace, chi: &Formula) -> Result<()> {
    if !is_constructible(chi) {
        return Err(Error::NonConstructible(chi.to_string()));
    }
    if !chi.free_vars().iter().all(|v| space.vars().contains(v)) {
        return Err(Error::Precondition(format!(
            "`{chi}` has free variables outside the space"
        )));
    }
    Ok(())
}

/// The set of types satisfying `chi`, evaluated at every realization.
pub fn constructible_eval(space: &BoundedTypeSpace, chi: &Formula) -> Result<ConstructibleSet> {
    check(space, chi)?;
    let mut extension = space.empty_set();
    let mut disagreements = Vec::new();
    for (k, p) in space.types.iter().enumerate() {
        let vals: Vec<bool> = p
            .realizations
            .iter()
            .map(|r| eval_at(space.structure(r), chi, space.vars(), &r.tuple))
            .collect();
        if vals[0] {
            extension.insert(k);
        }
        if vals.iter().any(|&v| v != vals[0]) {
            disagreements.push(k);
        }
    }
    Ok(ConstructibleSet {
        formula: canonicalize(chi),
        extension,
        disagreements,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum InductionCase {
    /// A positive formula, covered by its positive resultant.
    Atomic,
    /// `!psi`, covered by `[psi]`.
    Negation,
    /// A disjunction, covered by conjunctions of members of the children's
    /// resultants. Implications count as `!a | b`.
    Disjunction,
    /// A conjunction, covered by the union of the children's resultants.
    Conjunction,
}

impl InductionCase {
    pub fn label(self) -> &'static str {
        match self {
            InductionCase::Atomic => "atomic",
            InductionCase::Negation => "not",
            InductionCase::Disjunction => "or",
            InductionCase::Conjunction => "and",
        }
    }
}

/// The cover built by one induction step, with the steps below it.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub formula: Formula,
    pub case: InductionCase,
    pub cover: CoverReport,
    pub children: Vec<CaseReport>,
}

impl CaseReport {
    /// Whether this step and every step below it is covered.
    pub fn all_covered(&self) -> bool {
        self.cover.covered() && self.children.iter().all(CaseReport::all_covered)
    }

    /// Formulas of steps with an uncovered complement.
    pub fn uncovered(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        if !self.cover.covered() {
            out.push(&self.formula);
        }
        for c in &self.children {
            out.extend(c.uncovered());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructibleResultant {
    pub chi: Formula,
    pub depth: usize,
    /// Constructible formulas of depth `<= depth` with no joint realization
    /// with `chi` in any pec member.
    pub members: Vec<Formula>,
    /// `[chi]` complement against the union of the members' sets.
    pub cover: CoverReport,
    pub case: CaseReport,
}

/// Constructible resultant of `chi` at depth `d` relative to the pec members
/// of the space's class, with the per-case cover checks.
pub fn constructible_resultant(
    space: &BoundedTypeSpace,
    chi: &Formula,
    d: usize,
    limits: Limits,
) -> Result<ConstructibleResultant> {
    check(space, chi)?;
    ConstructibleResolver::new(space, d, limits)?.resultant(chi)
}

/// Constructible resultants over one space at one depth. The supplies and
/// their extensions are computed once and shared across formulas.
pub struct ConstructibleResolver<'a> {
    space: &'a BoundedTypeSpace,
    depth: usize,
    csupply: Supply,
    /// Per constructible formula: realizations satisfying it.
    c_real: Vec<FixedBitSet>,
    /// Per constructible formula: its set of types.
    c_ext: Vec<FixedBitSet>,
    psupply: Supply,
    /// Per positive formula: class tuples satisfying it.
    p_tuples: Vec<FixedBitSet>,
    p_basic: Vec<FixedBitSet>,
    tuples: Vec<(usize, Vec<usize>)>,
}

impl<'a> ConstructibleResolver<'a> {
    pub fn new(space: &'a BoundedTypeSpace, d: usize, limits: Limits) -> Result<Self> {
        let sig = &space.class.signature;
        let csupply = Supply::constructible(sig, space.vars(), d, limits)?;
        let psupply = Supply::positive(sig, space.vars(), d, limits)?;
        let sorts = sorting(space.vars());
        let tuples: Vec<(usize, Vec<usize>)> = space
            .class
            .members
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.tuples(&sorts).into_iter().map(move |t| (i, t)))
            .collect();
        let mut r = ConstructibleResolver {
            space,
            depth: d,
            c_real: Vec::new(),
            c_ext: Vec::new(),
            p_tuples: Vec::new(),
            p_basic: Vec::new(),
            csupply,
            psupply,
            tuples,
        };
        r.c_real = r.csupply.formulas().iter().map(|f| r.realized(f)).collect();
        r.c_ext = r
            .csupply
            .formulas()
            .iter()
            .map(|f| extension(space, f))
            .collect::<Result<_>>()?;
        r.p_tuples = r
            .psupply
            .formulas()
            .iter()
            .map(|f| r.class_sat(f))
            .collect();
        r.p_basic = r
            .psupply
            .formulas()
            .iter()
            .map(|f| space.basic_set(f))
            .collect();
        Ok(r)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn realized(&self, f: &Formula) -> FixedBitSet {
        let sp = self.space;
        let n = sp.realizations().count();
        let mut s = FixedBitSet::with_capacity(n);
        for (j, (_, r)) in sp.realizations().enumerate() {
            if eval_at(sp.structure(r), f, sp.vars(), &r.tuple) {
                s.insert(j);
            }
        }
        s
    }

    fn class_sat(&self, f: &Formula) -> FixedBitSet {
        let members = &self.space.class.members;
        let mut s = FixedBitSet::with_capacity(self.tuples.len());
        for (j, (i, t)) in self.tuples.iter().enumerate() {
            if eval_at(&members[*i], f, self.space.vars(), t) {
                s.insert(j);
            }
        }
        s
    }

    /// Supply indices of the constructible formulas jointly unrealized with `f`.
    fn members(&self, f: &Formula) -> Vec<usize> {
        let sat = self.realized(f);
        (0..self.c_real.len())
            .filter(|&i| self.c_real[i].is_disjoint(&sat))
            .collect()
    }

    fn member_cover(&self, f: &Formula) -> FixedBitSet {
        let mut cover = self.space.empty_set();
        for i in self.members(f) {
            cover.union_with(&self.c_ext[i]);
        }
        cover
    }

    pub fn resultant(&self, chi: &Formula) -> Result<ConstructibleResultant> {
        check(self.space, chi)?;
        let chi = canonicalize(chi);
        let members: Vec<Formula> = self
            .members(&chi)
            .into_iter()
            .map(|i| self.csupply.get(i).clone())
            .collect();
        let cover = self.member_cover(&chi);
        let inside = extension(self.space, &chi)?;
        let case = self.case_report(&chi)?;
        Ok(ConstructibleResultant {
            cover: CoverReport::from_sets(chi.clone(), self.space, &inside, &cover),
            chi,
            depth: self.depth,
            members,
            case,
        })
    }

    fn case_report(&self, chi: &Formula) -> Result<CaseReport> {
        let space = self.space;
        let inside = extension(space, chi)?;
        let report = |case, cover: FixedBitSet, children| CaseReport {
            formula: chi.clone(),
            case,
            cover: CoverReport::from_sets(chi.clone(), space, &inside, &cover),
            children,
        };
        if is_positive(chi) {
            let sat = self.class_sat(&canonicalize(chi));
            let mut cover = space.empty_set();
            for (i, t) in self.p_tuples.iter().enumerate() {
                if t.is_disjoint(&sat) {
                    cover.union_with(&self.p_basic[i]);
                }
            }
            return Ok(report(InductionCase::Atomic, cover, Vec::new()));
        }
        match chi {
            Formula::Not(psi) => {
                let inner = canonicalize(psi);
                let listed = self
                    .csupply
                    .position(&inner)
                    .is_some_and(|j| self.c_real[j].is_disjoint(&self.realized(chi)));
                let cover = if listed {
                    extension(space, psi)?
                } else {
                    space.empty_set()
                };
                Ok(report(InductionCase::Negation, cover, Vec::new()))
            }
            Formula::And(cs) => {
                let children: Vec<CaseReport> = cs
                    .iter()
                    .map(|c| self.case_report(c))
                    .collect::<Result<_>>()?;
                let mut cover = space.empty_set();
                for c in cs {
                    cover.union_with(&self.member_cover(c));
                }
                Ok(report(InductionCase::Conjunction, cover, children))
            }
            Formula::Or(_) | Formula::Implies(..) => {
                let cs: Vec<Formula> = match chi {
                    Formula::Or(cs) => cs.iter().cloned().collect(),
                    Formula::Implies(a, b) => {
                        vec![canonicalize(&Formula::not((**a).clone())), (**b).clone()]
                    }
                    _ => unreachable!(),
                };
                let children: Vec<CaseReport> = cs
                    .iter()
                    .map(|c| self.case_report(c))
                    .collect::<Result<_>>()?;
                let mut cover = space.whole();
                for c in &cs {
                    cover.intersect_with(&self.member_cover(c));
                }
                Ok(report(InductionCase::Disjunction, cover, children))
            }
            _ => Err(Error::NonConstructible(chi.to_string())),
        }
    }
}

fn extension(space: &BoundedTypeSpace, f: &Formula) -> Result<FixedBitSet> {
    Ok(constructible_eval(space, f)?.extension)
}
