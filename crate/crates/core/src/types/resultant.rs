//! Bounded resultants, spectral complement covers, separation and the
//! complement criterion for positive model completeness.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{by_depth, type_space_over, BoundedPositiveType, BoundedTypeSpace, Supply};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::classify::is_positive;
use crate::logic::{canonicalize, depth, Formula, Var};
use crate::semantics::eval::sorting;
use crate::semantics::{eval_at, UniverseClass};

/// The supply formulas with no joint realization with `phi` in any member.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultantSet {
    pub phi: Formula,
    pub vars: Vec<Var>,
    pub depth: usize,
    pub members: Vec<Formula>,
}

impl ResultantSet {
    pub fn contains(&self, f: &Formula) -> bool {
        let f = canonicalize(f);
        self.members.binary_search(&f).is_ok()
    }
}

/// Extensions of every supply formula over all tuples of all class members.
pub(crate) struct ClassExtensions {
    pub ext: Vec<FixedBitSet>,
}

impl ClassExtensions {
    pub fn new(class: &UniverseClass, supply: &Supply) -> Self {
        let sorts = sorting(&supply.vars);
        let pairs: Vec<(usize, Vec<usize>)> = class
            .members
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.tuples(&sorts).into_iter().map(move |t| (i, t)))
            .collect();
        let ext = supply
            .formulas()
            .iter()
            .map(|f| {
                let mut s = FixedBitSet::with_capacity(pairs.len());
                for (k, (i, t)) in pairs.iter().enumerate() {
                    if eval_at(&class.members[*i], f, &supply.vars, t) {
                        s.insert(k);
                    }
                }
                s
            })
            .collect();
        ClassExtensions { ext }
    }
}

fn require_positive(phi: &Formula) -> Result<()> {
    if is_positive(phi) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("`{phi}` is not positive")))
    }
}

/// Bounded resultant of `phi` over the depth-`d` positive supply in `vars`.
pub fn resultant(
    class: &UniverseClass,
    phi: &Formula,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<ResultantSet> {
    let supply = Supply::positive(&class.signature, vars, d, limits)?;
    resultant_in(class, &supply, phi)
}

/// Bounded resultant of `phi` over a given supply.
pub fn resultant_in(class: &UniverseClass, supply: &Supply, phi: &Formula) -> Result<ResultantSet> {
    require_positive(phi)?;
    let phi = canonicalize(phi);
    let sorts = sorting(&supply.vars);
    let mut sat: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, m) in class.members.iter().enumerate() {
        for t in m.tuples(&sorts) {
            if eval_at(m, &phi, &supply.vars, &t) {
                sat.push((i, t));
            }
        }
    }
    let members = supply
        .formulas()
        .iter()
        .filter(|psi| {
            sat.iter()
                .all(|(i, t)| !eval_at(&class.members[*i], psi, &supply.vars, t))
        })
        .cloned()
        .collect();
    Ok(ResultantSet {
        phi,
        vars: supply.vars.clone(),
        depth: supply.depth,
        members,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverStatus {
    Covered,
    /// Types outside `[phi]` lying in no resultant basic set; a depth
    /// artifact, not an error.
    UncoveredAtDepth(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub phi: Formula,
    /// Types outside `[phi]`.
    pub complement: Vec<usize>,
    /// Types in some `[psi]` with `psi` in the resultant.
    pub cover: Vec<usize>,
    /// Cover types inside `[phi]`; nonempty only on a broken invariant.
    pub excess: Vec<usize>,
    pub status: CoverStatus,
}

impl CoverReport {
    pub fn covered(&self) -> bool {
        self.status == CoverStatus::Covered && self.excess.is_empty()
    }

    pub(crate) fn from_sets(
        phi: Formula,
        space: &BoundedTypeSpace,
        inside: &FixedBitSet,
        cover: &FixedBitSet,
    ) -> Self {
        let complement = space.complement(inside);
        let uncovered: Vec<usize> = complement.difference(cover).collect();
        CoverReport {
            phi,
            complement: complement.ones().collect(),
            cover: cover.ones().collect(),
            excess: cover.intersection(inside).collect(),
            status: if uncovered.is_empty() {
                CoverStatus::Covered
            } else {
                CoverStatus::UncoveredAtDepth(uncovered)
            },
        }
    }
}

/// Compares the complement of `[phi]` with the union of `[psi]` over the
/// bounded resultant of `phi` at the space's depth.
pub fn spectral_complement_cover(space: &BoundedTypeSpace, phi: &Formula) -> Result<CoverReport> {
    let res = resultant_in(&space.class, &space.supply, phi)?;
    let mut cover = space.empty_set();
    for psi in &res.members {
        cover.union_with(&space.basic_set(psi));
    }
    Ok(CoverReport::from_sets(
        res.phi.clone(),
        space,
        &space.basic_set(&res.phi),
        &cover,
    ))
}

/// A formula in exactly one of two types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub formula: Formula,
    /// Whether the formula lies in the first type.
    pub in_first: bool,
}

/// The least formula, by depth then canonical order, in exactly one of `p`
/// and `q`.
pub fn hausdorff_witness(p: &BoundedPositiveType, q: &BoundedPositiveType) -> Result<Separation> {
    if p.vars != q.vars || p.depth != q.depth {
        return Err(Error::Precondition("types from different spaces".into()));
    }
    p.formulas
        .symmetric_difference(&q.formulas)
        .min_by(|a, b| (depth(a), *a).cmp(&(depth(b), *b)))
        .map(|f| Separation {
            formula: f.clone(),
            in_first: p.formulas.contains(f),
        })
        .ok_or(Error::IndistinguishableAtDepth(p.depth))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PmcReport {
    pub vars: Vec<Var>,
    pub depth: usize,
    /// `(phi, psi)` with `[psi]` the complement of `[phi]` and `phi & psi`
    /// realized in no member, in supply order.
    pub assignment: Vec<(Formula, Formula)>,
    /// Supply formulas with no such complement.
    pub failures: Vec<Formula>,
}

impl PmcReport {
    pub fn is_total(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn complement_of(&self, phi: &Formula) -> Option<&Formula> {
        let phi = canonicalize(phi);
        self.assignment
            .iter()
            .find(|(f, _)| *f == phi)
            .map(|(_, g)| g)
    }
}

/// For every supply formula `phi`, the least positive `psi` (by depth, then
/// canonically) with `[psi]` the complement of `[phi]` in the type space and
/// no joint realization with `phi` in any member.
pub fn pmc_check(
    class: &UniverseClass,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<PmcReport> {
    let supply = std::sync::Arc::new(Supply::positive(&class.signature, vars, d, limits)?);
    let space = type_space_over(class, supply.clone())?;
    pmc_in(&space)
}

pub(crate) fn pmc_in(space: &BoundedTypeSpace) -> Result<PmcReport> {
    let supply = &space.supply;
    let ext = ClassExtensions::new(&space.class, supply);
    let basic: Vec<FixedBitSet> = (0..supply.len()).map(|i| space.basic_set_at(i)).collect();
    let mut buckets: HashMap<&FixedBitSet, Vec<usize>> = HashMap::new();
    for i in by_depth(supply) {
        buckets.entry(&basic[i]).or_default().push(i);
    }
    let mut assignment = Vec::new();
    let mut failures = Vec::new();
    for (i, phi) in supply.formulas().iter().enumerate() {
        let want = space.complement(&basic[i]);
        let found = buckets
            .get(&want)
            .and_then(|cs| cs.iter().find(|&&j| ext.ext[i].is_disjoint(&ext.ext[j])));
        match found {
            Some(&j) => assignment.push((phi.clone(), supply.get(j).clone())),
            None => failures.push(phi.clone()),
        }
    }
    Ok(PmcReport {
        vars: supply.vars.clone(),
        depth: supply.depth,
        assignment,
        failures,
    })
}
