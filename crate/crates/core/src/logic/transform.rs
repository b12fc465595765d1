//! Canonical forms, capture-avoiding substitution and the depth measure.

use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{Formula, Signature, Sym, Term, Var};
use crate::error::{Error, Result};

/// Canonical representative of `f` up to flattening, deduplication, child
/// ordering, singleton collapse, vacuous quantifiers and bound-variable
/// renaming. Idempotent.
///
/// Vacuous quantifiers are dropped because every finite structure has a
/// nonempty carrier for every sort.
pub fn canonicalize(f: &Formula) -> Formula {
    let mut cur = rename_bound(&simplify(f));
    loop {
        let next = rename_bound(&simplify(&cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) => f.clone(),
        Formula::Eq(a, b) => {
            if a <= b {
                f.clone()
            } else {
                Formula::Eq(b.clone(), a.clone())
            }
        }
        Formula::And(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                match simplify(c) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(inner) => out.extend(inner),
                    other => {
                        out.insert(other);
                    }
                }
            }
            collapse(out, true)
        }
        Formula::Or(cs) => {
            let mut out = BTreeSet::new();
            for c in cs {
                match simplify(c) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(inner) => out.extend(inner),
                    other => {
                        out.insert(other);
                    }
                }
            }
            collapse(out, false)
        }
        Formula::Not(c) => Formula::not(simplify(c)),
        Formula::Implies(a, b) => Formula::implies(simplify(a), simplify(b)),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let body = simplify(body);
            if !body.free_vars().contains(v) {
                return body;
            }
            match f {
                Formula::Exists(..) => Formula::exists(v.clone(), body),
                _ => Formula::forall(v.clone(), body),
            }
        }
    }
}

fn collapse(mut set: BTreeSet<Formula>, conj: bool) -> Formula {
    match set.len() {
        0 if conj => Formula::True,
        0 => Formula::False,
        1 => set.pop_first().unwrap(),
        _ if conj => Formula::And(set),
        _ => Formula::Or(set),
    }
}

/// Bound variable of sort `s` under `k` enclosing binders of the same sort
/// gets index `base_s + k`, where `base_s` exceeds every free index of `s`.
fn rename_bound(f: &Formula) -> Formula {
    let mut base: BTreeMap<Sym, u32> = BTreeMap::new();
    for v in f.free_vars() {
        let e = base.entry(v.sort.clone()).or_insert(0);
        *e = (*e).max(v.index + 1);
    }
    let mut r = Renamer {
        base,
        depth: BTreeMap::new(),
        env: Vec::new(),
    };
    r.formula(f)
}

struct Renamer {
    base: BTreeMap<Sym, u32>,
    depth: BTreeMap<Sym, u32>,
    env: Vec<(Var, Var)>,
}

impl Renamer {
    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.env.iter().rev().find(|(old, _)| old == v) {
                Some((_, new)) => Term::Var(new.clone()),
                None => t.clone(),
            },
            Term::Const(_) => t.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Eq(a, b) => {
                let (a, b) = (self.term(a), self.term(b));
                if a <= b {
                    Formula::Eq(a, b)
                } else {
                    Formula::Eq(b, a)
                }
            }
            Formula::Atom(r, args) => {
                Formula::Atom(r.clone(), args.iter().map(|a| self.term(a)).collect())
            }
            Formula::And(cs) => Formula::And(cs.iter().map(|c| self.formula(c)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| self.formula(c)).collect()),
            Formula::Not(c) => Formula::not(self.formula(c)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a), self.formula(b)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let k = *self.depth.get(&v.sort).unwrap_or(&0);
                let base = *self.base.get(&v.sort).unwrap_or(&0);
                let new = Var::new(v.sort.clone(), base + k);
                self.depth.insert(v.sort.clone(), k + 1);
                self.env.push((v.clone(), new.clone()));
                let body = self.formula(body);
                self.env.pop();
                self.depth.insert(v.sort.clone(), k);
                match f {
                    Formula::Exists(..) => Formula::exists(new, body),
                    _ => Formula::forall(new, body),
                }
            }
        }
    }
}

/// Connective/quantifier depth: atoms 0, every connective or quantifier adds 1.
pub fn depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Atom(..) => 0,
        _ => 1 + f.children().iter().map(|c| depth(c)).max().unwrap_or(0),
    }
}

/// Capture-avoiding simultaneous substitution, checked for sorts.
pub fn substitute(sig: &Signature, f: &Formula, binding: &BTreeMap<Var, Term>) -> Result<Formula> {
    for (v, t) in binding {
        let s = sig.term_sort(t)?;
        if s != v.sort {
            return Err(Error::SortMismatch {
                expected: v.sort.to_string(),
                found: s.to_string(),
            });
        }
    }
    Ok(substitute_unchecked(f, binding))
}

/// Substitution without the sort check; callers guarantee sort agreement.
pub fn substitute_unchecked(f: &Formula, binding: &BTreeMap<Var, Term>) -> Formula {
    let mut next: BTreeMap<Sym, u32> = BTreeMap::new();
    let mut bump = |v: &Var| {
        let e = next.entry(v.sort.clone()).or_insert(0);
        *e = (*e).max(v.index + 1);
    };
    f.all_vars().iter().for_each(&mut bump);
    for (v, t) in binding {
        bump(v);
        let mut vs = BTreeSet::new();
        t.collect_vars(&mut vs);
        vs.iter().for_each(&mut bump);
    }
    let mut s = Subst { next };
    s.formula(f, binding)
}

struct Subst {
    next: BTreeMap<Sym, u32>,
}

fn subst_term(t: &Term, b: &BTreeMap<Var, Term>) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
        Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| subst_term(a, b)).collect()),
    }
}

impl Subst {
    fn fresh(&mut self, sort: &Sym) -> Var {
        let e = self.next.entry(sort.clone()).or_insert(0);
        let v = Var::new(sort.clone(), *e);
        *e += 1;
        v
    }

    fn formula(&mut self, f: &Formula, b: &BTreeMap<Var, Term>) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Eq(x, y) => Formula::Eq(subst_term(x, b), subst_term(y, b)),
            Formula::Atom(r, args) => {
                Formula::Atom(r.clone(), args.iter().map(|a| subst_term(a, b)).collect())
            }
            Formula::And(cs) => Formula::And(cs.iter().map(|c| self.formula(c, b)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| self.formula(c, b)).collect()),
            Formula::Not(c) => Formula::not(self.formula(c, b)),
            Formula::Implies(x, y) => Formula::implies(self.formula(x, b), self.formula(y, b)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let free = body.free_vars();
                let mut inner: BTreeMap<Var, Term> = b
                    .iter()
                    .filter(|(k, _)| *k != v && free.contains(*k))
                    .map(|(k, t)| (k.clone(), t.clone()))
                    .collect();
                let captured = inner.values().any(|t| t.mentions(v));
                let (nv, body) = if captured {
                    let nv = self.fresh(&v.sort);
                    inner.insert(v.clone(), Term::Var(nv.clone()));
                    (nv, self.formula(body, &inner))
                } else {
                    (v.clone(), self.formula(body, &inner))
                };
                match f {
                    Formula::Exists(..) => Formula::exists(nv, body),
                    _ => Formula::forall(nv, body),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Var {
        Var::new("V", i)
    }

    fn e(a: u32, b: u32) -> Formula {
        Formula::atom("E", vec![Term::Var(v(a)), Term::Var(v(b))])
    }

    fn graph() -> Signature {
        let mut s = Signature::new("Graph");
        s.add_sort("V").unwrap();
        s.add_relation("E", &["V", "V"]).unwrap();
        s.add_constant("c", "V").unwrap();
        s
    }

    #[test]
    fn and_of_duplicates_collapses() {
        let f = Formula::And([e(0, 1)].into_iter().collect());
        assert_eq!(canonicalize(&f), e(0, 1));
    }

    #[test]
    fn nested_or_flattens() {
        let inner = Formula::or([e(0, 1), e(1, 0)]);
        let f = Formula::or([inner, e(0, 0)]);
        assert_eq!(canonicalize(&f), Formula::or([e(0, 1), e(1, 0), e(0, 0)]));
    }

    #[test]
    fn alpha_equivalent_formulas_agree() {
        let a = Formula::exists(v(0), e(0, 1));
        let b = Formula::exists(v(2), e(2, 1));
        assert_eq!(canonicalize(&a), canonicalize(&b));
        assert_eq!(canonicalize(&a), Formula::exists(v(2), e(2, 1)));
    }

    #[test]
    fn substitution_examples() {
        let sig = graph();
        let c = Term::Const(Sym::new("c"));
        let b: BTreeMap<_, _> = [(v(0), c.clone())].into_iter().collect();
        assert_eq!(
            substitute(&sig, &e(0, 1), &b).unwrap(),
            Formula::atom("E", vec![c.clone(), Term::Var(v(1))])
        );

        let f = Formula::exists(v(0), e(0, 1));
        let b: BTreeMap<_, _> = [(v(1), Term::Var(v(0)))].into_iter().collect();
        let out = substitute(&sig, &f, &b).unwrap();
        match &out {
            Formula::Exists(nv, body) => {
                assert_ne!(nv, &v(0));
                assert_eq!(
                    **body,
                    Formula::atom("E", vec![Term::Var(nv.clone()), Term::Var(v(0))])
                );
            }
            other => panic!("unexpected {other:?}"),
        }

        let f = Formula::eq(Term::Var(v(0)), Term::Var(v(0)));
        let b: BTreeMap<_, _> = [(v(0), c.clone())].into_iter().collect();
        assert_eq!(substitute(&sig, &f, &b).unwrap(), Formula::eq(c.clone(), c));
    }

    #[test]
    fn substitution_rejects_sort_mismatch() {
        let mut sig = graph();
        sig.add_sort("W").unwrap();
        let b: BTreeMap<_, _> = [(v(0), Term::Var(Var::new("W", 0)))].into_iter().collect();
        assert!(matches!(
            substitute(&sig, &e(0, 1), &b),
            Err(Error::SortMismatch { .. })
        ));
    }

    #[test]
    fn depth_examples() {
        assert_eq!(depth(&e(0, 1)), 0);
        let pp = Formula::exists(v(2), Formula::and([e(0, 2), e(2, 1)]));
        assert_eq!(depth(&pp), 2);
        let hu = Formula::forall(v(0), Formula::implies(e(0, 0), Formula::False));
        assert_eq!(depth(&hu), 2);
    }
}
