//! The map from bounded positive types to maximal normal geometric types.

use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::dnf;
use crate::error::Result;
use crate::limits::Limits;
use crate::logic::{enumerate_positive, Formula, Signature, Var};
use crate::semantics::eval::sorting;
use crate::types::{BoundedTypeSpace, Realization, Supply};

/// Every disjunct of the normal form of a depth-`d` positive formula.
pub fn pp_supply(sig: &Signature, vars: &[Var], d: usize, limits: Limits) -> Result<Supply> {
    let mut out = BTreeSet::new();
    for f in enumerate_positive(sig, vars, d, limits)? {
        out.extend(dnf(&f, limits)?.disjuncts);
    }
    Ok(Supply::from_formulas(vars, d, out))
}

/// `p*`: the normal formulas over the pp supply with a disjunct true at the
/// realization, stored as the set of true pp formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct StarType {
    pub supply: Arc<Supply>,
    pub holds: FixedBitSet,
    pub realization: Realization,
    /// Whether every realization of the type gives the same set.
    pub independent: bool,
}

impl StarType {
    pub fn vars(&self) -> &[Var] {
        &self.supply.vars
    }

    /// The pp formulas of the supply true at the realization.
    pub fn pp_members(&self) -> Vec<&Formula> {
        self.holds.ones().map(|i| self.supply.get(i)).collect()
    }

    /// Membership of a geometric formula whose normal form draws its
    /// disjuncts from the supply; other formulas are not in `p*`.
    pub fn contains(&self, f: &Formula, limits: Limits) -> Result<bool> {
        let n = dnf(f, limits)?;
        let idx: Option<Vec<usize>> = n
            .disjuncts
            .iter()
            .map(|d| self.supply.position(d))
            .collect();
        Ok(idx.is_some_and(|ix| ix.iter().any(|&i| self.holds.contains(i))))
    }
}

/// `p*` for the type at index `k` of the space, over the given pp supply.
pub fn star_map(space: &BoundedTypeSpace, k: usize, pp: &Arc<Supply>) -> StarType {
    let p = &space.types[k];
    let profiles: Vec<FixedBitSet> = p
        .realizations
        .iter()
        .map(|r| pp.profile(space.structure(r), &r.tuple))
        .collect();
    StarType {
        supply: pp.clone(),
        independent: profiles.iter().all(|x| *x == profiles[0]),
        holds: profiles[0].clone(),
        realization: p.realizations[0].clone(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypGeoReport {
    pub stars: Vec<StarType>,
    /// Pairs of distinct types with equal images.
    pub collisions: Vec<(usize, usize)>,
    /// Maximal normal types, among those realized anywhere in the class,
    /// that are no `p*`.
    pub unreached: Vec<Vec<Formula>>,
    /// Types whose image is not maximal.
    pub non_maximal: Vec<usize>,
    /// Types whose realizations disagree on some pp formula.
    pub dependent: Vec<usize>,
}

impl TypGeoReport {
    pub fn injective(&self) -> bool {
        self.collisions.is_empty()
    }

    pub fn surjective(&self) -> bool {
        self.unreached.is_empty()
    }

    pub fn lands_in_maximal(&self) -> bool {
        self.non_maximal.is_empty()
    }
}

/// Checks that `p -> p*` is injective on the space and reaches every maximal
/// normal type realized in a member of the class.
pub fn typgeo_check(space: &BoundedTypeSpace, limits: Limits) -> Result<TypGeoReport> {
    let pp = Arc::new(pp_supply(
        &space.class.signature,
        space.vars(),
        space.depth(),
        limits,
    )?);
    let stars: Vec<StarType> = (0..space.len()).map(|k| star_map(space, k, &pp)).collect();
    let mut collisions = Vec::new();
    for i in 0..stars.len() {
        for j in i + 1..stars.len() {
            if stars[i].holds == stars[j].holds {
                collisions.push((i, j));
            }
        }
    }
    let sorts = sorting(space.vars());
    let mut realized: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in &space.class.members {
        for t in m.tuples(&sorts) {
            realized.insert(pp.profile(m, &t).ones().collect());
        }
    }
    let sets: Vec<FixedBitSet> = realized
        .iter()
        .map(|ones| {
            let mut s = FixedBitSet::with_capacity(pp.len());
            s.extend(ones.iter().copied());
            s
        })
        .collect();
    let strictly_below = |a: &FixedBitSet| sets.iter().any(|b| a.is_subset(b) && a != b);
    let maximal: Vec<&FixedBitSet> = sets.iter().filter(|s| !strictly_below(s)).collect();
    let unreached = maximal
        .iter()
        .filter(|m| !stars.iter().any(|s| s.holds == ***m))
        .map(|m| m.ones().map(|i| pp.get(i).clone()).collect())
        .collect();
    let non_maximal = (0..stars.len())
        .filter(|&k| strictly_below(&stars[k].holds))
        .collect();
    let dependent = (0..stars.len())
        .filter(|&k| !stars[k].independent)
        .collect();
    Ok(TypGeoReport {
        stars,
        collisions,
        unreached,
        non_maximal,
        dependent,
    })
}
