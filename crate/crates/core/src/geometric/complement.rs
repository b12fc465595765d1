//! Uniform geometric complements and geometric presentations of subsets of a
//! type space.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use super::{dnf, geo_type_disjunction, GeometricType};
use crate::error::{Error, Result};
use crate::forcing::is_existential;
use crate::limits::Limits;
use crate::logic::{canonicalize, Formula};
use crate::semantics::eval_at;
use crate::types::{resultant_in, BoundedTypeSpace, ClassExtensions};

/// Disagreements of a type and its complement on one pec member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementCheck {
    pub member: String,
    /// Tuples in both extensions.
    pub overlap: Vec<Vec<usize>>,
    /// Tuples in neither.
    pub uncovered: Vec<Vec<usize>>,
}

impl ComplementCheck {
    pub fn ok(&self) -> bool {
        self.overlap.is_empty() && self.uncovered.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricComplement {
    pub input: GeometricType,
    pub complement: GeometricType,
    pub checks: Vec<ComplementCheck>,
}

impl GeometricComplement {
    pub fn exact(&self) -> bool {
        self.checks.iter().all(ComplementCheck::ok)
    }
}

/// Each pp disjunct `phi_i` of a member goes to the disjunction of its
/// resultant; a member goes to the type of these; the type goes to the
/// disjunction of the member types. Checked on every pec member.
pub fn geo_complement(
    pi: &GeometricType,
    space: &BoundedTypeSpace,
    limits: Limits,
) -> Result<GeometricComplement> {
    if pi.vars != space.vars() {
        return Err(Error::TupleMismatch(
            "type and space over different tuples".into(),
        ));
    }
    let normal = pi.normalize(limits)?;
    let mut member_types = Vec::new();
    for f in &normal.formulas {
        let negs = dnf(f, limits)?
            .disjuncts
            .iter()
            .map(|d| {
                Ok(Formula::or(
                    resultant_in(&space.class, &space.supply, d)?.members,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        member_types.push(GeometricType::new(&pi.vars, negs)?);
    }
    let complement = if member_types.is_empty() {
        GeometricType::new(&pi.vars, [Formula::False])?
    } else {
        geo_type_disjunction(&member_types, limits)?
    };
    let checks = space
        .class
        .pec_members()
        .into_iter()
        .map(|m| {
            let (mut overlap, mut uncovered) = (Vec::new(), Vec::new());
            for t in m.tuples(&crate::semantics::eval::sorting(&pi.vars)) {
                match (pi.holds(m, &t), complement.holds(m, &t)) {
                    (true, true) => overlap.push(t),
                    (false, false) => uncovered.push(t),
                    _ => {}
                }
            }
            ComplementCheck {
                member: m.name.clone(),
                overlap,
                uncovered,
            }
        })
        .collect();
    Ok(GeometricComplement {
        input: pi.clone(),
        complement,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetReport {
    /// The requested set of type indices.
    pub set: Vec<usize>,
    pub ty: GeometricType,
    /// Types satisfying `ty`.
    pub extension: Vec<usize>,
}

impl SubsetReport {
    /// Whether `[ty]` is the requested set; a shortfall is a depth artifact.
    pub fn exact(&self) -> bool {
        self.set == self.extension
    }
}

/// A geometric type whose set in the space is `x`: each excluded type `q`
/// contributes the open `or { psi : psi in Res(phi), phi in q }` avoiding it.
pub fn subset_to_type(space: &BoundedTypeSpace, x: &FixedBitSet) -> Result<SubsetReport> {
    let vars = space.vars();
    let set: Vec<usize> = x.ones().filter(|&k| k < space.len()).collect();
    let ty = if set.is_empty() {
        GeometricType::new(vars, [Formula::False])?
    } else if set.len() == space.len() {
        GeometricType::new(vars, [Formula::True])?
    } else {
        let ext = ClassExtensions::new(&space.class, &space.supply);
        let mut res: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut members = BTreeSet::new();
        for (k, q) in space.types.iter().enumerate() {
            if x.contains(k) {
                continue;
            }
            let mut open = BTreeSet::new();
            for phi in q.bits.ones() {
                let r = res.entry(phi).or_insert_with(|| {
                    (0..space.supply.len())
                        .filter(|&j| ext.ext[phi].is_disjoint(&ext.ext[j]))
                        .collect()
                });
                open.extend(r.iter().map(|&j| space.supply.get(j).clone()));
            }
            members.insert(canonicalize(&Formula::Or(open)));
        }
        GeometricType::new(vars, members)?
    };
    let extension = (0..space.len())
        .filter(|&k| {
            let r = &space.types[k].realizations[0];
            ty.holds(space.structure(r), &r.tuple)
        })
        .collect();
    Ok(SubsetReport { set, ty, extension })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfinitaryReport {
    pub formula: Formula,
    pub member: String,
    /// Types not realized in the member; excluded from the set.
    pub unrealized: Vec<usize>,
    pub subset: SubsetReport,
    /// Tuples of the member where the formula and the type disagree.
    pub mismatches: Vec<Vec<usize>>,
}

impl InfinitaryReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The geometric type of an arbitrary formula, read off its set of types as
/// realized in the designated existential member.
pub fn infinitary_to_geometric(
    f: &Formula,
    space: &BoundedTypeSpace,
    member: &str,
    limits: Limits,
) -> Result<InfinitaryReport> {
    let vars = space.vars();
    if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::TupleMismatch(format!(
            "`{f}` mentions {} outside the tuple",
            v.name()
        )));
    }
    let e = space
        .class
        .member(member)
        .ok_or_else(|| Error::NotInClass(member.to_string()))?;
    let verdict = is_existential(&space.class, member, space.depth(), limits)?;
    if !verdict.existential {
        return Err(Error::NoExistentialMember(format!(
            "`{member}` is not existential at depth {} relative to the class",
            space.depth()
        )));
    }
    let mut set = space.empty_set();
    let mut unrealized = Vec::new();
    for (k, p) in space.types.iter().enumerate() {
        match p.realizations.iter().find(|r| r.structure == member) {
            Some(r) if eval_at(e, f, vars, &r.tuple) => set.insert(k),
            Some(_) => {}
            None => unrealized.push(k),
        }
    }
    let subset = subset_to_type(space, &set)?;
    let mismatches = e
        .tuples(&crate::semantics::eval::sorting(vars))
        .into_iter()
        .filter(|t| eval_at(e, f, vars, t) != subset.ty.holds(e, t))
        .collect();
    Ok(InfinitaryReport {
        formula: canonicalize(f),
        member: member.to_string(),
        unrealized,
        subset,
        mismatches,
    })
}
