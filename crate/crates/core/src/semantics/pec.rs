//! Positive existential closedness and continuations, relative to a class.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::class::UniverseClass;
use super::eval::eval_at;
use super::hom::{
    first_hom, for_each_hom, is_homomorphism, is_immersion, retraction, Homomorphism, Witness,
};
use super::structure::FiniteStructure;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::{enumerate_positive, Sym, Var};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PecCounterexample {
    /// Class member receiving the non-immersive map.
    pub target: String,
    pub hom: Homomorphism,
    pub witness: Option<Witness>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PecVerdict {
    pub pec: bool,
    pub counterexample: Option<PecCounterexample>,
}

/// Whether every homomorphism from `m` into a member of `class` is an
/// immersion.
pub fn is_pec(m: &FiniteStructure, class: &UniverseClass) -> Result<PecVerdict> {
    let i = class.index_of(m)?;
    is_pec_index(class, i)
}

pub(crate) fn is_pec_index(class: &UniverseClass, i: usize) -> Result<PecVerdict> {
    let m = &class.members[i];
    for b in &class.members {
        let mut bad: Option<Homomorphism> = None;
        let mut err = None;
        for_each_hom(m, b, &BTreeMap::new(), |h| match retraction(m, b, &h) {
            Ok(Some(_)) => ControlFlow::Continue(()),
            Ok(None) => {
                bad = Some(h);
                ControlFlow::Break(())
            }
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(h) = bad {
            let witness = is_immersion(m, b, &h)?.witness;
            return Ok(PecVerdict {
                pec: false,
                counterexample: Some(PecCounterexample {
                    target: b.name.clone(),
                    hom: h,
                    witness,
                }),
            });
        }
    }
    Ok(PecVerdict {
        pec: true,
        counterexample: None,
    })
}

/// A homomorphism from `m` into a pec member: the identity when `m` is pec,
/// otherwise the first map found scanning members in class order.
pub fn continue_to_pec(
    m: &FiniteStructure,
    class: &UniverseClass,
) -> Result<(String, Homomorphism)> {
    let i = class.index_of(m)?;
    let flags = class.pec_flags();
    if flags[i] {
        return Ok((m.name.clone(), Homomorphism::identity(m)));
    }
    for (b, &p) in class.members.iter().zip(flags) {
        if !p {
            continue;
        }
        if let Some(h) = first_hom(m, b, &BTreeMap::new())? {
            return Ok((b.name.clone(), h));
        }
    }
    Err(Error::NotContinuable(m.name.clone()))
}

/// Variables `(sort_i, k)` naming a tuple of the given sorting.
pub fn tuple_vars(sorting: &[Sym]) -> Vec<Var> {
    let mut counts: BTreeMap<Sym, u32> = BTreeMap::new();
    sorting
        .iter()
        .map(|s| {
            let c = counts.entry(s.clone()).or_insert(0);
            *c += 1;
            Var::new(s.clone(), *c - 1)
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JointContinuation {
    pub member: String,
    pub f: Homomorphism,
    pub g: Homomorphism,
}

/// First member `P` with maps `f: m -> P`, `g: n -> P` and `f(a) = g(b)`.
/// `None` means the class is too small to witness the amalgam and should be
/// reported as an adequacy warning.
#[allow(clippy::too_many_arguments)]
pub fn joint_continuation(
    m: &FiniteStructure,
    n: &FiniteStructure,
    class: &UniverseClass,
    sorting: &[Sym],
    a: &[usize],
    b: &[usize],
    depth: usize,
    limits: Limits,
) -> Result<Option<JointContinuation>> {
    if a.len() != sorting.len() || b.len() != sorting.len() {
        return Err(Error::TupleMismatch(
            "tuples do not match the sorting".into(),
        ));
    }
    for (s, (&x, &y)) in sorting.iter().zip(a.iter().zip(b)) {
        if x >= m.size(s) || y >= n.size(s) {
            return Err(Error::TupleMismatch(format!(
                "element out of range for sort {s}"
            )));
        }
    }
    let vars = tuple_vars(sorting);
    let supply = enumerate_positive(&m.signature, &vars, depth, limits)?;
    if let Some(phi) = supply
        .iter()
        .find(|phi| eval_at(m, phi, &vars, a) != eval_at(n, phi, &vars, b))
    {
        return Err(Error::Precondition(format!(
            "tuples have different positive types at depth {depth}: {}",
            crate::text::print_formula(&m.signature, phi)
        )));
    }
    if m == n && a == b && class.index_of(m).is_ok() {
        let id = Homomorphism::identity(m);
        return Ok(Some(JointContinuation {
            member: m.name.clone(),
            f: id.clone(),
            g: id,
        }));
    }
    for p in &class.members {
        let mut found = None;
        let mut err = None;
        for_each_hom(m, p, &BTreeMap::new(), |f| {
            let mut fixed: BTreeMap<Sym, BTreeMap<usize, usize>> = BTreeMap::new();
            for (s, (&y, &x)) in sorting.iter().zip(b.iter().zip(a)) {
                let want = f.apply(s, x);
                let e = fixed.entry(s.clone()).or_default();
                if e.get(&y).is_some_and(|&v| v != want) {
                    return ControlFlow::Continue(());
                }
                e.insert(y, want);
            }
            match first_hom(n, p, &fixed) {
                Ok(Some(g)) => {
                    found = Some(JointContinuation {
                        member: p.name.clone(),
                        f,
                        g,
                    });
                    ControlFlow::Break(())
                }
                Ok(None) => ControlFlow::Continue(()),
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Colimit of a finite chain `s_0 -> s_1 -> ... -> s_n`: the last structure
/// with the composite map from the first.
pub fn directed_colimit(
    structures: &[FiniteStructure],
    homs: &[Homomorphism],
) -> Result<(FiniteStructure, Homomorphism)> {
    if structures.is_empty() || homs.len() + 1 != structures.len() {
        return Err(Error::NonComposable(0));
    }
    let mut composite = Homomorphism::identity(&structures[0]);
    for (i, h) in homs.iter().enumerate() {
        let (a, b) = (&structures[i], &structures[i + 1]);
        if h.source != a.name || h.target != b.name || !is_homomorphism(a, b, &h.maps) {
            return Err(Error::NonComposable(i));
        }
        composite = composite.then(h);
    }
    Ok((structures.last().unwrap().clone(), composite))
}
