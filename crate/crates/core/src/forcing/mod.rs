//! Existential forcing, genericity, existential members and back-and-forth
//! systems, relative to a class.
//!
//! `A` forces `f(a)` when every type of the bounded space that extends the
//! bounded positive type of `a` lies in `[f]`. For non-positive `f`, `[f]`
//! is read at realizations in the designated existential member.

mod existential;
mod karp;

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::classify::is_positive;
use crate::logic::{canonicalize, enumerate_first_order, Connective, Formula, Var};
use crate::semantics::eval::sorting;
use crate::semantics::{eval_at, homomorphisms, FiniteStructure, UniverseClass};
use crate::types::{by_depth, type_space, BoundedTypeSpace, Realization, Supply};

pub use existential::{
    is_existential, ExistentialChecker, ExistentialCounterexample, ExistentialReport,
    EXISTENTIAL_PARAMS,
};
pub use karp::{
    back_and_forth, existential_preservation, infinitary_agreement, AgreementReport,
    BackAndForthFailure, BackAndForthSystem, Direction, Element, KarpOutcome, PreservationReport,
};

/// A type space with a designated existential member and the first-order
/// supply used for genericity, built on demand.
pub struct ForcingContext {
    pub space: BoundedTypeSpace,
    pub limits: Limits,
    designated: Option<String>,
    checker: OnceLock<Result<ExistentialChecker>>,
    existential: OnceLock<Result<String>>,
    first_order: OnceLock<Result<FirstOrder>>,
}

/// The first-order supply and, per type, the formulas whose set contains it.
struct FirstOrder {
    supply: Supply,
    order: Vec<usize>,
    members: Vec<FixedBitSet>,
}

impl ForcingContext {
    pub fn new(class: &UniverseClass, vars: &[Var], d: usize, limits: Limits) -> Result<Self> {
        Ok(Self::over(type_space(class, vars, d, limits)?, limits))
    }

    pub fn over(space: BoundedTypeSpace, limits: Limits) -> Self {
        ForcingContext {
            space,
            limits,
            designated: None,
            checker: OnceLock::new(),
            existential: OnceLock::new(),
            first_order: OnceLock::new(),
        }
    }

    /// Names the member used to read `[f]`; verified on first use.
    pub fn with_existential(mut self, member: &str) -> Self {
        self.designated = Some(member.to_string());
        self
    }

    pub fn class(&self) -> &UniverseClass {
        &self.space.class
    }

    pub fn depth(&self) -> usize {
        self.space.depth()
    }

    pub fn vars(&self) -> &[Var] {
        self.space.vars()
    }

    fn checker(&self) -> Result<&ExistentialChecker> {
        self.checker
            .get_or_init(|| {
                ExistentialChecker::new(self.class(), self.depth(), EXISTENTIAL_PARAMS, self.limits)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// [`is_existential`] at the context's depth, sharing one cache.
    pub fn existential(&self, member: &str) -> Result<ExistentialReport> {
        self.checker()?.check(self.class(), member)
    }

    /// The designated member, or the first existential pec member.
    pub fn existential_member(&self) -> Result<&str> {
        self.existential
            .get_or_init(|| {
                let candidates: Vec<String> = match &self.designated {
                    Some(m) => vec![m.clone()],
                    None => self
                        .class()
                        .pec_members()
                        .iter()
                        .map(|m| m.name.clone())
                        .collect(),
                };
                for c in &candidates {
                    if self.existential(c)?.existential {
                        return Ok(c.clone());
                    }
                }
                Err(Error::NoExistentialMember(match &self.designated {
                    Some(m) => format!("`{m}` is not existential at depth {}", self.depth()),
                    None => format!("no pec member is existential at depth {}", self.depth()),
                }))
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Where `[f]` is read for type `k`: a realization in the existential
    /// member, else the canonical one.
    fn reading(&self, k: usize, member: &str) -> &Realization {
        let p = &self.space.types[k];
        p.realizations
            .iter()
            .find(|r| r.structure == member)
            .unwrap_or(&p.realizations[0])
    }

    /// `[f]` as a set of type indices.
    pub fn extension(&self, f: &Formula) -> Result<FixedBitSet> {
        self.check_vars(f)?;
        if is_positive(f) {
            return Ok(self.space.basic_set(f));
        }
        let e = self.existential_member()?;
        let mut s = self.space.empty_set();
        for k in 0..self.space.len() {
            let r = self.reading(k, e);
            if eval_at(self.space.structure(r), f, self.vars(), &r.tuple) {
                s.insert(k);
            }
        }
        Ok(s)
    }

    fn check_vars(&self, f: &Formula) -> Result<()> {
        match f.free_vars().into_iter().find(|v| !self.vars().contains(v)) {
            Some(v) => Err(Error::TupleMismatch(format!(
                "`{f}` mentions {} outside the tuple",
                v.name()
            ))),
            None => Ok(()),
        }
    }

    /// Types of the space extending the bounded positive type of `a` in `m`.
    pub fn extending(&self, m: &FiniteStructure, a: &[usize]) -> FixedBitSet {
        let tp = self.space.supply.profile(m, a);
        let mut s = self.space.empty_set();
        for (k, p) in self.space.types.iter().enumerate() {
            if tp.is_subset(&p.bits) {
                s.insert(k);
            }
        }
        s
    }

    fn first_order(&self) -> Result<&FirstOrder> {
        self.first_order
            .get_or_init(|| {
                let e = self.existential_member()?.to_string();
                let fs = enumerate_first_order(
                    &self.class().signature,
                    self.vars(),
                    self.depth(),
                    self.limits,
                )?;
                let supply = Supply::from_formulas(self.vars(), self.depth(), fs);
                let members = (0..self.space.len())
                    .map(|k| {
                        let r = self.reading(k, &e);
                        supply.profile(self.space.structure(r), &r.tuple)
                    })
                    .collect();
                Ok(FirstOrder {
                    order: by_depth(&supply),
                    supply,
                    members,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The first-order supply used by genericity checks.
    pub fn first_order_supply(&self) -> Result<&Supply> {
        Ok(&self.first_order()?.supply)
    }

    /// Indices of the first-order supply forced at `a` in `m`.
    fn forced_bits(&self, fo: &FirstOrder, m: &FiniteStructure, a: &[usize]) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(fo.supply.len());
        out.insert_range(..);
        for k in self.extending(m, a).ones() {
            out.intersect_with(&fo.members[k]);
        }
        out
    }
}

fn check_tuple(ctx: &ForcingContext, m: &FiniteStructure, a: &[usize]) -> Result<()> {
    let vars = ctx.vars();
    if vars.len() != a.len() || vars.iter().zip(a).any(|(v, &e)| e >= m.size(&v.sort)) {
        return Err(Error::TupleMismatch(format!(
            "tuple {a:?} does not fit the space's variables in `{}`",
            m.name
        )));
    }
    Ok(())
}

/// Whether `m` forces `f(a)`.
pub fn forces(m: &FiniteStructure, f: &Formula, a: &[usize], ctx: &ForcingContext) -> Result<bool> {
    check_tuple(ctx, m, a)?;
    let set = ctx.extension(f)?;
    Ok(ctx.extending(m, a).is_subset(&set))
}

/// Agreement of satisfaction and forcing for one head connective.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConnectiveTally {
    pub checked: usize,
    pub failed: usize,
}

impl ConnectiveTally {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericFailure {
    pub formula: Formula,
    pub tuple: Vec<usize>,
    pub satisfied: bool,
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericReport {
    pub member: String,
    pub depth: usize,
    pub width_cap: usize,
    pub generic: bool,
    pub by_connective: BTreeMap<Connective, ConnectiveTally>,
    /// The failure with the shallowest formula, then the least tuple.
    pub first_failure: Option<GenericFailure>,
}

impl GenericReport {
    pub fn tally(&self, c: Connective) -> ConnectiveTally {
        self.by_connective.get(&c).cloned().unwrap_or_default()
    }
}

/// Whether satisfaction and forcing agree in `member` on every enumerated
/// first-order formula of the context's depth and every tuple.
pub fn is_generic(member: &str, ctx: &ForcingContext) -> Result<GenericReport> {
    let m = ctx
        .class()
        .member(member)
        .ok_or_else(|| Error::NotInClass(member.to_string()))?;
    let fo = ctx.first_order()?;
    let heads: Vec<Connective> = fo.supply.formulas().iter().map(Formula::head).collect();
    let mut by_connective: BTreeMap<Connective, ConnectiveTally> = BTreeMap::new();
    let mut first: Option<(usize, GenericFailure)> = None;
    let rank: HashMap<usize, usize> = fo.order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    for t in m.tuples(&sorting(ctx.vars())) {
        let sat = fo.supply.profile(m, &t);
        let forced = ctx.forced_bits(fo, m, &t);
        let mut diff = sat.clone();
        diff.symmetric_difference_with(&forced);
        for (i, h) in heads.iter().enumerate() {
            let e = by_connective.entry(*h).or_default();
            e.checked += 1;
            if diff.contains(i) {
                e.failed += 1;
                if first.as_ref().is_none_or(|(r, _)| rank[&i] < *r) {
                    first = Some((
                        rank[&i],
                        GenericFailure {
                            formula: fo.supply.get(i).clone(),
                            tuple: t.clone(),
                            satisfied: sat.contains(i),
                            forced: forced.contains(i),
                        },
                    ));
                }
            }
        }
    }
    Ok(GenericReport {
        member: member.to_string(),
        depth: ctx.depth(),
        width_cap: ctx.limits.width_cap,
        generic: first.is_none(),
        by_connective,
        first_failure: first.map(|(_, f)| f),
    })
}

/// Instances where a pec member forces both or neither of `f` and `!f`.
#[derive(Clone, Debug, PartialEq)]
pub struct PecteReport {
    pub member: String,
    pub checked: usize,
    /// `(formula, tuple, forces both)`.
    pub violations: Vec<(Formula, Vec<usize>, bool)>,
}

impl PecteReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For `member`, every enumerated formula and tuple: exactly one of `f` and
/// `!f` is forced.
pub fn pecte_check(member: &str, ctx: &ForcingContext) -> Result<PecteReport> {
    let m = ctx
        .class()
        .member(member)
        .ok_or_else(|| Error::NotInClass(member.to_string()))?;
    let fo = ctx.first_order()?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for t in m.tuples(&sorting(ctx.vars())) {
        let ext = ctx.extending(m, &t);
        let forced = ctx.forced_bits(fo, m, &t);
        let mut some = FixedBitSet::with_capacity(fo.supply.len());
        for k in ext.ones() {
            some.union_with(&fo.members[k]);
        }
        for i in 0..fo.supply.len() {
            checked += 1;
            let pos = forced.contains(i);
            let neg = !some.contains(i);
            if pos == neg {
                violations.push((fo.supply.get(i).clone(), t.clone(), pos));
            }
        }
    }
    Ok(PecteReport {
        member: member.to_string(),
        checked,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityViolation {
    pub source: String,
    pub target: String,
    pub tuple: Vec<usize>,
    pub image: Vec<usize>,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// Distinct `(member, tuple, member, image)` instances checked.
    pub checked: usize,
    pub violations: Vec<StabilityViolation>,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every homomorphism `h: A -> B` between class members: whatever `A`
/// forces at `a`, `B` forces at `h(a)`.
pub fn stability_check(ctx: &ForcingContext) -> Result<StabilityReport> {
    let class = ctx.class();
    let fo = ctx.first_order()?;
    let sorts = sorting(ctx.vars());
    let forced: Vec<HashMap<Vec<usize>, FixedBitSet>> = class
        .members
        .iter()
        .map(|m| {
            m.tuples(&sorts)
                .into_iter()
                .map(|t| {
                    let f = ctx.forced_bits(fo, m, &t);
                    (t, f)
                })
                .collect()
        })
        .collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, a) in class.members.iter().enumerate() {
        for (j, b) in class.members.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            for h in homomorphisms(a, b)? {
                for t in a.tuples(&sorts) {
                    let ht = h.apply_tuple(&sorts, &t);
                    if !seen.insert((t.clone(), ht.clone())) {
                        continue;
                    }
                    checked += 1;
                    let lost: Vec<usize> = forced[i][&t].difference(&forced[j][&ht]).collect();
                    if let Some(&k) = lost.first() {
                        violations.push(StabilityViolation {
                            source: a.name.clone(),
                            target: b.name.clone(),
                            tuple: t,
                            image: ht,
                            formula: fo.supply.get(k).clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(StabilityReport {
        checked,
        violations,
    })
}

/// Canonical negation, for callers comparing `f` with `!f`.
pub fn negation(f: &Formula) -> Formula {
    canonicalize(&Formula::not(f.clone()))
}

#[cfg(test)]
mod tests;
