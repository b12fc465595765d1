//! Disjunctive normal forms of geometric formulas, geometric types and their
//! algebra, the map `p -> p*`, and geometric presentations of subsets of a
//! type space.
//!
//! At desk scale every disjunction is finite, so geometric formulas are the
//! positive ones.

mod complement;
mod star;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::classify::{is_geometric, is_pp};
use crate::logic::transform::substitute_unchecked;
use crate::logic::{canonicalize, Formula, Signature, Sym, Term, Var};
use crate::semantics::eval::sorting;
use crate::semantics::{eval_at, FiniteStructure};
use crate::text::{parse_formula, print_formula};

pub use complement::{
    geo_complement, infinitary_to_geometric, subset_to_type, ComplementCheck, GeometricComplement,
    InfinitaryReport, SubsetReport,
};
pub use star::{pp_supply, star_map, typgeo_check, StarType, TypGeoReport};

/// A finite disjunction of canonical positive-primitive formulas. The empty
/// disjunction is `false`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalGeometricFormula {
    pub disjuncts: BTreeSet<Formula>,
}

impl NormalGeometricFormula {
    pub fn to_formula(&self) -> Formula {
        canonicalize(&Formula::Or(self.disjuncts.clone()))
    }
}

/// `(bound variables, atoms)` of a pp formula. `true` has no atoms.
fn split_pp(f: &Formula) -> (Vec<Var>, Vec<Formula>) {
    let mut bound = Vec::new();
    let mut body = f;
    while let Formula::Exists(v, b) = body {
        bound.push(v.clone());
        body = b;
    }
    let atoms = match body {
        Formula::True => Vec::new(),
        Formula::And(cs) => cs.iter().cloned().collect(),
        other => vec![other.clone()],
    };
    (bound, atoms)
}

/// Conjunction of pp formulas, bound variables renamed apart.
fn conj_pp(parts: &[&Formula]) -> Formula {
    let mut next: BTreeMap<Sym, u32> = BTreeMap::new();
    for p in parts {
        for v in p.all_vars() {
            let e = next.entry(v.sort.clone()).or_insert(0);
            *e = (*e).max(v.index + 1);
        }
    }
    let mut bound = Vec::new();
    let mut atoms = Vec::new();
    for p in parts {
        let (bs, ats) = split_pp(p);
        let mut map = BTreeMap::new();
        for b in bs {
            let e = next.get_mut(&b.sort).expect("sort seen");
            let nv = Var::new(b.sort.clone(), *e);
            *e += 1;
            map.insert(b, Term::Var(nv.clone()));
            bound.push(nv);
        }
        atoms.extend(ats.iter().map(|a| substitute_unchecked(a, &map)));
    }
    canonicalize(&Formula::exists_all(bound, Formula::and(atoms)))
}

fn ceiling(n: usize, limits: Limits) -> Result<()> {
    if n > limits.disjunct_ceiling {
        return Err(Error::ResourceCeiling {
            what: "normal form disjuncts".into(),
            limit: limits.disjunct_ceiling,
        });
    }
    Ok(())
}

/// Disjunctive normal form: conjunction distributes over disjuncts, the
/// existential moves into each disjunct, disjunction unions disjunct sets.
pub fn dnf(f: &Formula, limits: Limits) -> Result<NormalGeometricFormula> {
    if !is_geometric(f) {
        return Err(Error::NonGeometric(f.to_string()));
    }
    Ok(NormalGeometricFormula {
        disjuncts: dnf_set(f, limits)?,
    })
}

fn dnf_set(f: &Formula, limits: Limits) -> Result<BTreeSet<Formula>> {
    Ok(match f {
        Formula::False => BTreeSet::new(),
        Formula::True | Formula::Eq(..) | Formula::Atom(..) => [canonicalize(f)].into(),
        Formula::Or(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                out.extend(dnf_set(c, limits)?);
                ceiling(out.len(), limits)?;
            }
            out
        }
        Formula::And(cs) => {
            let mut acc: BTreeSet<Formula> = [Formula::True].into();
            for c in cs {
                let ds = dnf_set(c, limits)?;
                ceiling(acc.len().saturating_mul(ds.len()), limits)?;
                let mut next = BTreeSet::new();
                for a in &acc {
                    for d in &ds {
                        next.insert(conj_pp(&[a, d]));
                    }
                }
                acc = next;
            }
            acc.remove(&Formula::False);
            acc
        }
        Formula::Exists(v, body) => dnf_set(body, limits)?
            .into_iter()
            .map(|d| canonicalize(&Formula::exists(v.clone(), d)))
            .collect(),
        _ => return Err(Error::NonGeometric(f.to_string())),
    })
}

/// A set of geometric formulas in a fixed tuple, read conjunctively.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeometricType {
    pub vars: Vec<Var>,
    pub formulas: BTreeSet<Formula>,
    /// Every member is a disjunction of pp formulas.
    pub normal: bool,
}

impl GeometricType {
    /// Canonicalizes the members; all must be geometric with free variables
    /// in `vars`.
    pub fn new(vars: &[Var], formulas: impl IntoIterator<Item = Formula>) -> Result<Self> {
        let formulas: BTreeSet<Formula> = formulas.into_iter().map(|f| canonicalize(&f)).collect();
        for f in &formulas {
            if !is_geometric(f) {
                return Err(Error::NonGeometric(f.to_string()));
            }
            if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(Error::TupleMismatch(format!(
                    "`{f}` mentions {} outside the tuple",
                    v.name()
                )));
            }
        }
        Ok(Self::trusted(vars, formulas))
    }

    fn trusted(vars: &[Var], formulas: BTreeSet<Formula>) -> Self {
        let normal = formulas.iter().all(|f| match f {
            Formula::Or(cs) => cs.iter().all(is_pp),
            other => *other == Formula::False || is_pp(other),
        });
        GeometricType {
            vars: vars.to_vec(),
            formulas,
            normal,
        }
    }

    /// The type with every member replaced by its normal form.
    pub fn normalize(&self, limits: Limits) -> Result<Self> {
        let fs = self
            .formulas
            .iter()
            .map(|f| dnf(f, limits).map(|n| n.to_formula()))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Self::trusted(&self.vars, fs))
    }

    pub fn holds(&self, m: &FiniteStructure, tuple: &[usize]) -> bool {
        self.formulas
            .iter()
            .all(|f| eval_at(m, f, &self.vars, tuple))
    }

    /// Tuples of `m` satisfying every member.
    pub fn extension(&self, m: &FiniteStructure) -> Vec<Vec<usize>> {
        m.tuples(&sorting(&self.vars))
            .into_iter()
            .filter(|t| self.holds(m, t))
            .collect()
    }

    /// `GType[f, g]`, members in canonical order.
    pub fn print(&self, sig: &Signature) -> String {
        let fs: Vec<String> = self
            .formulas
            .iter()
            .map(|f| print_formula(sig, f))
            .collect();
        format!("GType[{}]", fs.join(", "))
    }

    /// Inverse of [`GeometricType::print`].
    pub fn parse(sig: &Signature, vars: &[Var], text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix("GType[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Precondition("expected `GType[...]`".into()))?;
        let mut parts = Vec::new();
        let (mut level, mut start) = (0i32, 0);
        for (i, c) in inner.char_indices() {
            match c {
                '(' | '[' | '{' => level += 1,
                ')' | ']' | '}' => level -= 1,
                ',' if level == 0 => {
                    parts.push(&inner[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !inner[start..].trim().is_empty() {
            parts.push(&inner[start..]);
        }
        let fs = parts
            .into_iter()
            .map(|p| parse_formula(sig, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, fs)
    }
}

/// The disjunction of types: every choice of one member from each type,
/// joined by `or`.
pub fn geo_type_disjunction(types: &[GeometricType], limits: Limits) -> Result<GeometricType> {
    let Some(first) = types.first() else {
        return Err(Error::Precondition("empty list of types".into()));
    };
    if types.iter().any(|t| t.vars != first.vars) {
        return Err(Error::TupleMismatch("types over different tuples".into()));
    }
    let mut acc: BTreeSet<BTreeSet<Formula>> = [BTreeSet::new()].into();
    for t in types {
        ceiling(acc.len().saturating_mul(t.formulas.len()), limits)?;
        let mut next = BTreeSet::new();
        for choice in &acc {
            for f in &t.formulas {
                let mut c = choice.clone();
                c.insert(f.clone());
                next.insert(c);
            }
        }
        acc = next;
    }
    let fs = acc
        .into_iter()
        .map(|c| canonicalize(&Formula::Or(c)))
        .collect();
    Ok(GeometricType::trusted(&first.vars, fs))
}
