//! Existential members: partial positive types realized in a continuation
//! are realized in the member itself.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::{depth, Formula, Sym, Var};
use crate::semantics::pec::tuple_vars;
use crate::semantics::{homomorphisms, FiniteStructure, Homomorphism, UniverseClass};
use crate::types::{by_depth, Supply};

/// Parameter tuples `b` range over this length.
pub const EXISTENTIAL_PARAMS: usize = 2;

/// A partial type `pi(x, b)` realized in a continuation but not in the member.
#[derive(Clone, Debug, PartialEq)]
pub struct ExistentialCounterexample {
    /// `x` first, then the parameter variables.
    pub vars: Vec<Var>,
    pub pi: Vec<Formula>,
    pub params: Vec<usize>,
    pub continuation: Homomorphism,
    /// The realizing element of the continuation's target.
    pub realizer: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExistentialReport {
    pub member: String,
    pub depth: usize,
    pub params: usize,
    pub existential: bool,
    pub pec: bool,
    pub counterexample: Option<ExistentialCounterexample>,
}

impl ExistentialReport {
    /// An existential verdict should come with a pec one.
    pub fn implies_pec(&self) -> bool {
        !self.existential || self.pec
    }
}

struct Pattern {
    sorts: Vec<Sym>,
    supply: Supply,
    order: Vec<usize>,
    /// Profiles of every tuple of every pec member, by member index.
    targets: BTreeMap<usize, HashMap<Vec<usize>, FixedBitSet>>,
}

/// (max depth, size, formulas) of a counterexample prefix.
type MinimalityKey = (usize, usize, Vec<Formula>);

/// Caches the supplies and pec-member profiles needed to test every member
/// of one class at one depth.
pub struct ExistentialChecker {
    depth: usize,
    params: usize,
    patterns: Vec<Pattern>,
}

fn profiles(
    supply: &Supply,
    m: &FiniteStructure,
    sorts: &[Sym],
) -> HashMap<Vec<usize>, FixedBitSet> {
    m.tuples(sorts)
        .into_iter()
        .map(|t| {
            let p = supply.profile(m, &t);
            (t, p)
        })
        .collect()
}

impl ExistentialChecker {
    /// Every sort for `x` and every sorting of `params` parameters.
    pub fn new(class: &UniverseClass, d: usize, params: usize, limits: Limits) -> Result<Self> {
        let sorts: Vec<Sym> = class.signature.sorts().iter().cloned().collect();
        let mut sortings: Vec<Vec<Sym>> = vec![Vec::new()];
        for _ in 0..=params {
            sortings = sortings
                .into_iter()
                .flat_map(|s| {
                    sorts.iter().map(move |x| {
                        let mut s = s.clone();
                        s.push(x.clone());
                        s
                    })
                })
                .collect();
        }
        let mut patterns = Vec::new();
        for sorting in sortings {
            let vars = tuple_vars(&sorting);
            let supply = Supply::positive(&class.signature, &vars, d, limits)?;
            let targets = class
                .pec_flags()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p)
                .map(|(i, _)| (i, profiles(&supply, &class.members[i], &sorting)))
                .collect();
            patterns.push(Pattern {
                order: by_depth(&supply),
                sorts: sorting,
                supply,
                targets,
            });
        }
        Ok(ExistentialChecker {
            depth: d,
            params,
            patterns,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Only continuations into pec members are scanned: every continuation
    /// continues into one, and a larger type is realized whenever a smaller
    /// one fails to be.
    pub fn check(&self, class: &UniverseClass, member: &str) -> Result<ExistentialReport> {
        let i = class
            .members
            .iter()
            .position(|m| m.name == member)
            .ok_or_else(|| Error::NotInClass(member.to_string()))?;
        let m = &class.members[i];
        let mut best: Option<(MinimalityKey, ExistentialCounterexample)> = None;
        for pat in &self.patterns {
            let own = profiles(&pat.supply, m, &pat.sorts);
            let (xs, ys) = pat.sorts.split_at(1);
            for (&j, target_profiles) in &pat.targets {
                let target = &class.members[j];
                let mut images: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Homomorphism>> =
                    BTreeMap::new();
                for h in homomorphisms(m, target)? {
                    for b in m.tuples(ys) {
                        let hb = h.apply_tuple(ys, &b);
                        images
                            .entry(b)
                            .or_default()
                            .entry(hb)
                            .or_insert_with(|| h.clone());
                    }
                }
                for (b, hbs) in &images {
                    let realizers: Vec<&FixedBitSet> = (0..m.size(&xs[0]))
                        .map(|a| &own[&[&[a][..], b].concat()])
                        .collect();
                    for (hb, h) in hbs {
                        for a2 in 0..target.size(&xs[0]) {
                            let full = &target_profiles[&[&[a2][..], hb].concat()];
                            let Some(pi) = unrealized_core(full, &realizers, &pat.order) else {
                                continue;
                            };
                            let formulas: Vec<Formula> =
                                pi.ones().map(|k| pat.supply.get(k).clone()).collect();
                            let key = (
                                formulas.iter().map(depth).max().unwrap_or(0),
                                formulas.len(),
                                formulas.clone(),
                            );
                            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                                best = Some((
                                    key,
                                    ExistentialCounterexample {
                                        vars: pat.supply.vars.clone(),
                                        pi: formulas,
                                        params: b.clone(),
                                        continuation: h.clone(),
                                        realizer: a2,
                                    },
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(ExistentialReport {
            member: member.to_string(),
            depth: self.depth,
            params: self.params,
            existential: best.is_none(),
            pec: class.pec_flags()[i],
            counterexample: best.map(|(_, c)| c),
        })
    }
}

/// An irreducible unrealized subset of `full`, built from the shallowest
/// formulas: the shortest unrealized prefix in depth order, then pruned from
/// the deep end. `None` when `full` itself is realized.
fn unrealized_core(
    full: &FixedBitSet,
    realizers: &[&FixedBitSet],
    order: &[usize],
) -> Option<FixedBitSet> {
    if realizers.iter().any(|r| full.is_subset(r)) {
        return None;
    }
    let mut alive: Vec<&FixedBitSet> = realizers.to_vec();
    let mut pi = FixedBitSet::with_capacity(full.len());
    for &k in order.iter().filter(|&&k| full.contains(k)) {
        if alive.is_empty() {
            break;
        }
        pi.insert(k);
        alive.retain(|r| r.contains(k));
    }
    let chosen: Vec<usize> = order.iter().copied().filter(|&k| pi.contains(k)).collect();
    for &k in chosen.iter().rev() {
        pi.set(k, false);
        if realizers.iter().any(|r| pi.is_subset(r)) {
            pi.insert(k);
        }
    }
    Some(pi)
}

/// Whether `member` realizes, for every parameter tuple, every depth-`d`
/// partial positive type realized over the image of the tuple in a
/// continuation within the class.
pub fn is_existential(
    class: &UniverseClass,
    member: &str,
    d: usize,
    limits: Limits,
) -> Result<ExistentialReport> {
    ExistentialChecker::new(class, d, EXISTENTIAL_PARAMS, limits)?.check(class, member)
}
