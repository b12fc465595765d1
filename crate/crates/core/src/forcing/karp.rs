//! Back-and-forth systems between finite structures, and agreement on
//! enumerated formulas.

use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use super::existential::{ExistentialChecker, EXISTENTIAL_PARAMS};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::{enumerate_first_order, Formula, Sym, Var};
use crate::semantics::eval::sorting;
use crate::semantics::pec::tuple_vars;
use crate::semantics::{homomorphisms, FiniteStructure, UniverseClass};
use crate::types::Supply;

/// A sorted element.
pub type Element = (Sym, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    /// The empty pair is missing: the sentences differ.
    Root,
    Forth,
    Back,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackAndForthFailure {
    pub left: Vec<Element>,
    pub right: Vec<Element>,
    pub direction: Direction,
    /// The element with no partner, `None` for [`Direction::Root`].
    pub element: Option<Element>,
}

/// Pairs of repetition-free tuples of equal sorting and equal bounded
/// positive type, with one chosen partner per extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackAndForthSystem {
    pub depth: usize,
    pub pairs: Vec<(Vec<Element>, Vec<Element>)>,
    /// Per pair, `(m, n)` with the pair extended by `m` and `n` in the system.
    pub forth: Vec<Vec<(Element, Element)>>,
    /// Per pair, `(n, m)` likewise.
    pub back: Vec<Vec<(Element, Element)>>,
}

impl BackAndForthSystem {
    pub fn contains(&self, a: &[Element], b: &[Element]) -> bool {
        self.pairs.iter().any(|(x, y)| x == a && y == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KarpOutcome {
    pub system: BackAndForthSystem,
    pub failure: Option<BackAndForthFailure>,
}

impl KarpOutcome {
    pub fn equivalent(&self) -> bool {
        self.failure.is_none()
    }
}

fn elements(m: &FiniteStructure) -> Vec<Element> {
    m.carriers()
        .iter()
        .flat_map(|(s, c)| (0..c.len()).map(move |i| (s.clone(), i)))
        .collect()
}

/// Repetition-free tuples, shortest first.
fn injective_tuples(m: &FiniteStructure) -> Vec<Vec<Element>> {
    let els = elements(m);
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<Element>> = vec![Vec::new()];
    for _ in 0..els.len() {
        let mut next = Vec::new();
        for t in &frontier {
            for e in &els {
                if !t.contains(e) {
                    let mut u = t.clone();
                    u.push(e.clone());
                    next.push(u);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

struct Typer {
    depth: usize,
    limits: Limits,
    supplies: HashMap<Vec<Sym>, Supply>,
}

impl Typer {
    fn profile(&mut self, m: &FiniteStructure, t: &[Element]) -> Result<(Vec<Sym>, FixedBitSet)> {
        let sorts: Vec<Sym> = t.iter().map(|(s, _)| s.clone()).collect();
        if !self.supplies.contains_key(&sorts) {
            let s = Supply::positive(&m.signature, &tuple_vars(&sorts), self.depth, self.limits)?;
            self.supplies.insert(sorts.clone(), s);
        }
        let idx: Vec<usize> = t.iter().map(|(_, i)| *i).collect();
        let p = self.supplies[&sorts].profile(m, &idx);
        Ok((sorts, p))
    }
}

/// Partners in `other` for each element of `pool` outside `a`, keeping the
/// extended pair in `alive`. `alive` is keyed left to right; `flip` marks
/// the back direction, where `a` is the right-hand tuple.
fn extensions(
    alive: &HashSet<(Vec<Element>, Vec<Element>)>,
    a: &[Element],
    b: &[Element],
    pool: &[Element],
    other: &[Element],
    flip: bool,
) -> std::result::Result<Vec<(Element, Element)>, Element> {
    let mut found = Vec::new();
    for e in pool.iter().filter(|e| !a.contains(e)) {
        let partner = other
            .iter()
            .filter(|o| o.0 == e.0 && !b.contains(o))
            .find(|o| {
                let (mut x, mut y) = (a.to_vec(), b.to_vec());
                x.push(e.clone());
                y.push((*o).clone());
                alive.contains(&if flip { (y, x) } else { (x, y) })
            });
        match partner {
            Some(o) => found.push((e.clone(), o.clone())),
            None => return Err(e.clone()),
        }
    }
    Ok(found)
}

/// The largest back-and-forth system inside the type-equal pairs, found by
/// discarding pairs with a missing extension until none is left. Tuples
/// never repeat an element; a repeated element has its partner already.
pub fn back_and_forth(
    m: &FiniteStructure,
    n: &FiniteStructure,
    d: usize,
    limits: Limits,
) -> Result<KarpOutcome> {
    if m.signature != n.signature {
        return Err(Error::SignatureMismatch(format!(
            "`{}` and `{}`",
            m.name, n.name
        )));
    }
    let mut typer = Typer {
        depth: d,
        limits,
        supplies: HashMap::new(),
    };
    let mut right: HashMap<(Vec<Sym>, FixedBitSet), Vec<Vec<Element>>> = HashMap::new();
    for t in injective_tuples(n) {
        let key = typer.profile(n, &t)?;
        right.entry(key).or_default().push(t);
    }
    let mut pairs = Vec::new();
    for a in injective_tuples(m) {
        let key = typer.profile(m, &a)?;
        for b in right.get(&key).into_iter().flatten() {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let (em, en) = (elements(m), elements(n));
    let root = (Vec::new(), Vec::new());
    let mut failure = (!pairs.contains(&root)).then(|| BackAndForthFailure {
        left: Vec::new(),
        right: Vec::new(),
        direction: Direction::Root,
        element: None,
    });
    let mut alive: HashSet<(Vec<Element>, Vec<Element>)> = pairs.iter().cloned().collect();
    loop {
        let mut dropped = Vec::new();
        for (a, b) in pairs.iter().filter(|p| alive.contains(*p)) {
            let missing = match extensions(&alive, a, b, &em, &en, false) {
                Err(e) => Some((Direction::Forth, e)),
                Ok(_) => extensions(&alive, b, a, &en, &em, true)
                    .err()
                    .map(|e| (Direction::Back, e)),
            };
            if let Some((direction, e)) = missing {
                dropped.push(BackAndForthFailure {
                    left: a.clone(),
                    right: b.clone(),
                    direction,
                    element: Some(e),
                });
            }
        }
        if dropped.is_empty() {
            break;
        }
        for f in dropped {
            alive.remove(&(f.left.clone(), f.right.clone()));
            if f.left.is_empty() && failure.is_none() {
                failure = Some(f);
            }
        }
    }
    pairs.retain(|p| alive.contains(p));
    let forth = pairs
        .iter()
        .map(|(a, b)| extensions(&alive, a, b, &em, &en, false).expect("closed system"))
        .collect();
    let back = pairs
        .iter()
        .map(|(a, b)| extensions(&alive, b, a, &en, &em, true).expect("closed system"))
        .collect();
    Ok(KarpOutcome {
        system: BackAndForthSystem {
            depth: d,
            pairs,
            forth,
            back,
        },
        failure,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub checked: usize,
    /// Enumerated formulas true at exactly one side.
    pub disagreements: Vec<Formula>,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn as_elements(vars: &[Var], t: &[usize]) -> Vec<Element> {
    vars.iter()
        .zip(t)
        .map(|(v, &e)| (v.sort.clone(), e))
        .collect()
}

/// Position-wise first occurrences, if the two tuples repeat alike.
fn dedup_alike(a: &[Element], b: &[Element]) -> Option<(Vec<Element>, Vec<Element>)> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (p, q) in a.iter().zip(b) {
        match (x.iter().position(|e| e == p), y.iter().position(|e| e == q)) {
            (None, None) => {
                x.push(p.clone());
                y.push(q.clone());
            }
            (Some(i), Some(j)) if i == j => {}
            _ => return None,
        }
    }
    Some((x, y))
}

/// Agreement of `m` at `a` and `n` at `b` on every enumerated first-order
/// formula of depth `<= d` in `vars`. Requires a full back-and-forth system
/// containing the pair.
pub fn infinitary_agreement(
    m: &FiniteStructure,
    n: &FiniteStructure,
    vars: &[Var],
    a: &[usize],
    b: &[usize],
    d: usize,
    limits: Limits,
) -> Result<AgreementReport> {
    if vars.len() != a.len() || vars.len() != b.len() {
        return Err(Error::TupleMismatch(
            "tuples and variables differ in length".into(),
        ));
    }
    let outcome = back_and_forth(m, n, d, limits)?;
    if !outcome.equivalent() {
        return Err(Error::Precondition(format!(
            "`{}` and `{}` have no full back-and-forth system at depth {d}",
            m.name, n.name
        )));
    }
    let in_system = dedup_alike(&as_elements(vars, a), &as_elements(vars, b))
        .is_some_and(|(x, y)| outcome.system.contains(&x, &y));
    if !in_system {
        return Err(Error::Precondition(
            "the pair is not in the back-and-forth system".into(),
        ));
    }
    let supply = Supply::from_formulas(
        vars,
        d,
        enumerate_first_order(&m.signature, vars, d, limits)?,
    );
    let mut diff = supply.profile(m, a);
    diff.symmetric_difference_with(&supply.profile(n, b));
    Ok(AgreementReport {
        checked: supply.len(),
        disagreements: diff.ones().map(|i| supply.get(i).clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreservationReport {
    /// Members passing the existential check.
    pub members: Vec<String>,
    pub homs: usize,
    pub checked: usize,
    /// `(source, target, tuple, formula)` where truth changes along a map.
    pub violations: Vec<(String, String, Vec<usize>, Formula)>,
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every homomorphism between existential members preserves and reflects
/// every enumerated first-order formula in `vars`.
pub fn existential_preservation(
    class: &UniverseClass,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<PreservationReport> {
    let checker = ExistentialChecker::new(class, d, EXISTENTIAL_PARAMS, limits)?;
    let mut members = Vec::new();
    for m in &class.members {
        if checker.check(class, &m.name)?.existential {
            members.push(m.name.clone());
        }
    }
    let supply = Supply::from_formulas(
        vars,
        d,
        enumerate_first_order(&class.signature, vars, d, limits)?,
    );
    let sorts = sorting(vars);
    let (mut homs, mut checked, mut violations) = (0, 0, Vec::new());
    for e1 in &members {
        let a = class.member(e1).expect("member");
        for e2 in &members {
            let b = class.member(e2).expect("member");
            let mut seen = BTreeSet::new();
            for h in homomorphisms(a, b)? {
                homs += 1;
                for t in a.tuples(&sorts) {
                    let ht = h.apply_tuple(&sorts, &t);
                    if !seen.insert((t.clone(), ht.clone())) {
                        continue;
                    }
                    checked += supply.len();
                    let mut diff = supply.profile(a, &t);
                    diff.symmetric_difference_with(&supply.profile(b, &ht));
                    if let Some(i) = diff.ones().next() {
                        violations.push((e1.clone(), e2.clone(), t, supply.get(i).clone()));
                    }
                }
            }
        }
    }
    Ok(PreservationReport {
        members,
        homs,
        checked,
        violations,
    })
}
