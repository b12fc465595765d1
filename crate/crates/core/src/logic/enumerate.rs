//! Bounded enumeration of canonical formulas by depth.
//!
//! `E_0(V)` is the set of atoms over the small terms of `V`. `E_k(V)` adds
//! `And`/`Or` over at most `width_cap` members of `E_{k-1}(V)` and `exists v`
//! over members of `E_{k-1}(V + v)` mentioning a fresh `v`. The first-order
//! variant also closes under `!`, `->` and `forall`; the constructible one
//! under `!` alone, quantifying only positive bodies. Every result is
//! canonical, and a result is kept only when each of its `And`/`Or` nodes has
//! at most `width_cap` children.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use super::classify::is_positive;
use super::syntax::{Formula, Signature, Term, Var};
use super::transform::canonicalize;
use crate::error::{Error, Result};
use crate::limits::Limits;

/// All canonical positive formulas of depth `<= d` with free variables among
/// `vars`, sorted in the canonical order.
pub fn enumerate_positive(
    sig: &Signature,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<Vec<Formula>> {
    Enumerator::new(sig, limits, Mode::Positive).run(vars, d)
}

/// Boolean combinations of positive formulas, by depth.
pub fn enumerate_constructible(
    sig: &Signature,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<Vec<Formula>> {
    Enumerator::new(sig, limits, Mode::Constructible).run(vars, d)
}

/// As [`enumerate_positive`], adding negation, implication and universal
/// quantification.
pub fn enumerate_first_order(
    sig: &Signature,
    vars: &[Var],
    d: usize,
    limits: Limits,
) -> Result<Vec<Formula>> {
    Enumerator::new(sig, limits, Mode::FirstOrder).run(vars, d)
}

/// Atoms over the small terms of `vars`, including `true`, `false` and
/// equalities.
pub fn atoms(sig: &Signature, vars: &[Var]) -> Vec<Formula> {
    let terms = sig.small_terms(vars);
    let mut out = BTreeSet::new();
    out.insert(Formula::True);
    out.insert(Formula::False);
    let sorted: Vec<(Term, _)> = terms
        .iter()
        .filter_map(|t| sig.term_sort(t).ok().map(|s| (t.clone(), s)))
        .collect();
    for (i, (a, sa)) in sorted.iter().enumerate() {
        for (b, sb) in &sorted[i..] {
            if sa == sb {
                out.insert(canonicalize(&Formula::Eq(a.clone(), b.clone())));
            }
        }
    }
    for (r, sorting) in sig.relations() {
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for s in sorting {
            let pool: Vec<&Term> = sorted
                .iter()
                .filter(|(_, st)| st == s)
                .map(|(t, _)| t)
                .collect();
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    pool.iter().map(move |t| {
                        let mut c = c.clone();
                        c.push((*t).clone());
                        c
                    })
                })
                .collect();
        }
        out.extend(
            combos
                .into_iter()
                .map(|args| Formula::Atom(r.clone(), args)),
        );
    }
    out.into_iter().collect()
}

/// Largest number of children of any `And`/`Or` node.
pub fn max_width(f: &Formula) -> usize {
    let mut w = 0;
    f.visit(&mut |g| {
        if let Formula::And(cs) | Formula::Or(cs) = g {
            w = w.max(cs.len());
        }
    });
    w
}

struct Level {
    all: Vec<Formula>,
    fresh: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Positive,
    Constructible,
    FirstOrder,
}

struct Enumerator<'a> {
    sig: &'a Signature,
    limits: Limits,
    mode: Mode,
    memo: HashMap<(usize, BTreeSet<Var>), Rc<Level>>,
}

impl<'a> Enumerator<'a> {
    fn new(sig: &'a Signature, limits: Limits, mode: Mode) -> Self {
        Enumerator {
            sig,
            limits,
            mode,
            memo: HashMap::new(),
        }
    }

    fn run(mut self, vars: &[Var], d: usize) -> Result<Vec<Formula>> {
        let vs: BTreeSet<Var> = vars.iter().cloned().collect();
        let lvl = self.level(d, &vs)?;
        Ok(lvl.all.clone())
    }

    fn ceiling(&self, n: usize) -> Result<()> {
        if n > self.limits.ceiling {
            return Err(Error::ResourceCeiling {
                what: "formula enumeration".into(),
                limit: self.limits.ceiling,
            });
        }
        Ok(())
    }

    fn level(&mut self, k: usize, vars: &BTreeSet<Var>) -> Result<Rc<Level>> {
        let key = (k, vars.clone());
        if let Some(l) = self.memo.get(&key) {
            return Ok(l.clone());
        }
        let v: Vec<Var> = vars.iter().cloned().collect();
        let lvl = if k == 0 {
            let all = atoms(self.sig, &v);
            let fresh = vec![true; all.len()];
            Level { all, fresh }
        } else {
            self.step(k, vars)?
        };
        self.ceiling(lvl.all.len())?;
        let lvl = Rc::new(lvl);
        self.memo.insert(key, lvl.clone());
        Ok(lvl)
    }

    fn step(&mut self, k: usize, vars: &BTreeSet<Var>) -> Result<Level> {
        let prev = self.level(k - 1, vars)?;
        let known: HashSet<&Formula> = prev.all.iter().collect();
        let mut new: BTreeSet<Formula> = BTreeSet::new();
        let w = self.limits.width_cap;
        let ceiling = self.limits.ceiling;
        let push = |f: Formula, new: &mut BTreeSet<Formula>| -> Result<()> {
            let f = canonicalize(&f);
            if max_width(&f) <= w && !known.contains(&f) {
                new.insert(f);
                if new.len() > ceiling {
                    return Err(Error::ResourceCeiling {
                        what: "formula enumeration".into(),
                        limit: ceiling,
                    });
                }
            }
            Ok(())
        };

        let n = prev.all.len();
        for m in 2..=w.min(n) {
            let mut idx: Vec<usize> = (0..m).collect();
            loop {
                if idx.iter().any(|&i| prev.fresh[i]) {
                    let set: BTreeSet<Formula> = idx.iter().map(|&i| prev.all[i].clone()).collect();
                    push(Formula::And(set.clone()), &mut new)?;
                    push(Formula::Or(set), &mut new)?;
                }
                if !next_combination(&mut idx, n) {
                    break;
                }
            }
        }

        if self.mode != Mode::Positive {
            for (i, a) in prev.all.iter().enumerate() {
                if prev.fresh[i] {
                    push(Formula::not(a.clone()), &mut new)?;
                }
            }
        }
        if self.mode == Mode::FirstOrder {
            for (i, a) in prev.all.iter().enumerate() {
                for (j, b) in prev.all.iter().enumerate() {
                    if prev.fresh[i] || prev.fresh[j] {
                        push(Formula::implies(a.clone(), b.clone()), &mut new)?;
                    }
                }
            }
        }

        for sort in self.sig.sorts().clone() {
            let index = vars
                .iter()
                .filter(|v| v.sort == sort)
                .map(|v| v.index + 1)
                .max()
                .unwrap_or(0);
            let fresh_var = Var::new(sort.clone(), index);
            let mut ext = vars.clone();
            ext.insert(fresh_var.clone());
            let body_level = self.level(k - 1, &ext)?;
            for (i, body) in body_level.all.iter().enumerate() {
                if !body_level.fresh[i] || !body.free_vars().contains(&fresh_var) {
                    continue;
                }
                if self.mode == Mode::Constructible && !is_positive(body) {
                    continue;
                }
                push(Formula::exists(fresh_var.clone(), body.clone()), &mut new)?;
                if self.mode == Mode::FirstOrder {
                    push(Formula::forall(fresh_var.clone(), body.clone()), &mut new)?;
                }
            }
        }

        let mut all: Vec<(Formula, bool)> = prev.all.iter().map(|f| (f.clone(), false)).collect();
        all.extend(new.into_iter().map(|f| (f, true)));
        all.sort();
        let (all, fresh) = all.into_iter().unzip();
        Ok(Level { all, fresh })
    }
}

/// Advances `idx` to the next strictly increasing index tuple below `n`.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let m = idx.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if idx[i] < n - m + i {
            idx[i] += 1;
            for j in i + 1..m {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::classify::is_constructible;

    fn graph() -> Signature {
        let mut s = Signature::new("Graph");
        s.add_sort("V").unwrap();
        s.add_relation("E", &["V", "V"]).unwrap();
        s
    }

    #[test]
    fn depth_zero_single_variable() {
        let x = Var::new("V", 0);
        let got =
            enumerate_positive(&graph(), std::slice::from_ref(&x), 0, Limits::default()).unwrap();
        let tx = Term::Var(x);
        let want: BTreeSet<Formula> = [
            Formula::True,
            Formula::False,
            Formula::atom("E", vec![tx.clone(), tx.clone()]),
            Formula::eq(tx.clone(), tx),
        ]
        .into_iter()
        .collect();
        assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn empty_tuple_contains_constants() {
        let got = enumerate_positive(&graph(), &[], 0, Limits::default()).unwrap();
        assert!(got.contains(&Formula::True) && got.contains(&Formula::False));
    }

    #[test]
    fn output_sorted_and_unique() {
        let vs = [Var::new("V", 0), Var::new("V", 1)];
        let got = enumerate_positive(&graph(), &vs, 2, Limits::default()).unwrap();
        assert!(got.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ceiling_is_enforced() {
        let vs = [Var::new("V", 0), Var::new("V", 1)];
        let err = enumerate_positive(&graph(), &vs, 2, Limits::default().with_ceiling(50));
        assert!(matches!(err, Err(Error::ResourceCeiling { .. })));
    }

    #[test]
    fn constructible_supply_is_constructible() {
        let vs = [Var::new("V", 0)];
        let got = enumerate_constructible(&graph(), &vs, 2, Limits::default()).unwrap();
        assert!(got.iter().all(is_constructible));
        let pos = enumerate_positive(&graph(), &vs, 2, Limits::default()).unwrap();
        assert!(pos.iter().all(|f| got.binary_search(f).is_ok()));
        assert!(got.iter().any(|f| matches!(f, Formula::Not(_))));
    }

    #[test]
    fn combinations_cover_all_pairs() {
        let mut idx = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut idx, 5) {
            n += 1;
        }
        assert_eq!(n, 10);
    }
}
