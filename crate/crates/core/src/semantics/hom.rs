//! Homomorphism search, immersions and isomorphism.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;

use super::eval::eval_at;
use super::structure::FiniteStructure;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::{canonicalize, enumerate_positive, Formula, Sym, Term, Var};

/// Sorted map between two structures, given per sort as an index table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Homomorphism {
    pub source: String,
    pub target: String,
    pub maps: BTreeMap<Sym, Vec<usize>>,
}

impl Homomorphism {
    /// Validates that `maps` preserves atomic truth from `a` to `b`.
    pub fn new(
        a: &FiniteStructure,
        b: &FiniteStructure,
        maps: BTreeMap<Sym, Vec<usize>>,
    ) -> Result<Self> {
        let h = Homomorphism {
            source: a.name.clone(),
            target: b.name.clone(),
            maps,
        };
        if !is_homomorphism(a, b, &h.maps) {
            return Err(Error::Precondition(format!(
                "map {} -> {} does not preserve atomic truth",
                a.name, b.name
            )));
        }
        Ok(h)
    }

    pub fn identity(a: &FiniteStructure) -> Self {
        Homomorphism {
            source: a.name.clone(),
            target: a.name.clone(),
            maps: a
                .carriers()
                .iter()
                .map(|(s, c)| (s.clone(), (0..c.len()).collect()))
                .collect(),
        }
    }

    pub fn apply(&self, sort: &Sym, e: usize) -> usize {
        self.maps[sort][e]
    }

    pub fn apply_tuple(&self, sorts: &[Sym], t: &[usize]) -> Vec<usize> {
        sorts
            .iter()
            .zip(t)
            .map(|(s, &e)| self.apply(s, e))
            .collect()
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            maps: self
                .maps
                .iter()
                .map(|(s, m)| (s.clone(), m.iter().map(|&e| other.maps[s][e]).collect()))
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.maps.values().all(|m| {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == m.len()
        })
    }

    pub fn is_bijective_onto(&self, b: &FiniteStructure) -> bool {
        self.is_injective() && self.maps.iter().all(|(s, m)| m.len() == b.size(s))
    }
}

/// Direct check of atomic preservation for an arbitrary sorted map.
pub fn is_homomorphism(
    a: &FiniteStructure,
    b: &FiniteStructure,
    maps: &BTreeMap<Sym, Vec<usize>>,
) -> bool {
    let sig = &a.signature;
    for s in sig.sorts() {
        match maps.get(s) {
            Some(m) if m.len() == a.size(s) && m.iter().all(|&e| e < b.size(s)) => {}
            _ => return false,
        }
    }
    let img = |s: &Sym, e: usize| maps[s][e];
    for (r, sorting) in sig.relations() {
        let Some(table) = a.relation(r) else { continue };
        for t in table.tuples() {
            let ft: Vec<usize> = sorting.iter().zip(t).map(|(s, &e)| img(s, e)).collect();
            if !b.holds(r, &ft) {
                return false;
            }
        }
    }
    for (f, (arity, res)) in sig.functions() {
        for (args, v) in a.function_table(f) {
            let fa: Vec<usize> = arity.iter().zip(&args).map(|(s, &e)| img(s, e)).collect();
            if b.apply(f, &fa) != img(res, v) {
                return false;
            }
        }
    }
    for (c, s) in sig.constants() {
        if img(s, a.constant(c)) != b.constant(c) {
            return false;
        }
    }
    true
}

fn check_signatures(a: &FiniteStructure, b: &FiniteStructure) -> Result<()> {
    if a.signature.sorts() != b.signature.sorts()
        || a.signature.relations() != b.signature.relations()
        || a.signature.functions() != b.signature.functions()
        || a.signature.constants() != b.signature.constants()
    {
        return Err(Error::SignatureMismatch(format!(
            "`{}` and `{}` have different signatures",
            a.name, b.name
        )));
    }
    Ok(())
}

enum Check {
    Rel(Sym, Vec<usize>),
    Fun(Sym, Vec<usize>, usize),
}

/// Backtracking search over sorted maps with a fixed partial assignment.
struct Search<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    sorts: Vec<Sym>,
    offset: Vec<usize>,
    slot_sort: Vec<usize>,
    fixed: Vec<Option<usize>>,
    checks: Vec<Vec<Check>>,
    value: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(
        a: &'a FiniteStructure,
        b: &'a FiniteStructure,
        fixed: &BTreeMap<Sym, BTreeMap<usize, usize>>,
    ) -> Option<Self> {
        let sig = &a.signature;
        let sorts: Vec<Sym> = sig.sorts().iter().cloned().collect();
        let pos: HashMap<&Sym, usize> = sorts.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut offset = Vec::new();
        let mut slot_sort = Vec::new();
        for (i, s) in sorts.iter().enumerate() {
            offset.push(slot_sort.len());
            slot_sort.extend(std::iter::repeat_n(i, a.size(s)));
        }
        let n = slot_sort.len();
        let slot = |s: &Sym, e: usize| offset[pos[s]] + e;
        let mut fix = vec![None; n];
        for (s, m) in fixed {
            for (&e, &v) in m {
                if v >= b.size(s) {
                    return None;
                }
                fix[slot(s, e)] = Some(v);
            }
        }
        for (c, s) in sig.constants() {
            let k = slot(s, a.constant(c));
            let want = b.constant(c);
            match fix[k] {
                Some(v) if v != want => return None,
                _ => fix[k] = Some(want),
            }
        }
        let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
        for (r, sorting) in sig.relations() {
            let Some(table) = a.relation(r) else { continue };
            for t in table.tuples() {
                let slots: Vec<usize> = sorting.iter().zip(t).map(|(s, &e)| slot(s, e)).collect();
                match slots.iter().max() {
                    Some(&last) => checks[last].push(Check::Rel(r.clone(), slots)),
                    None => {
                        if !b.holds(r, &[]) {
                            return None;
                        }
                    }
                }
            }
        }
        for (f, (arity, res)) in sig.functions() {
            for (args, v) in a.function_table(f) {
                let slots: Vec<usize> = arity.iter().zip(&args).map(|(s, &e)| slot(s, e)).collect();
                let vs = slot(res, v);
                let last = slots.iter().copied().chain([vs]).max().unwrap();
                checks[last].push(Check::Fun(f.clone(), slots, vs));
            }
        }
        Some(Search {
            a,
            b,
            sorts,
            offset,
            slot_sort,
            fixed: fix,
            checks,
            value: vec![0; n],
        })
    }

    fn ok_at(&self, k: usize) -> bool {
        self.checks[k].iter().all(|c| match c {
            Check::Rel(r, slots) => {
                let t: Vec<usize> = slots.iter().map(|&s| self.value[s]).collect();
                self.b.holds(r, &t)
            }
            Check::Fun(f, slots, v) => {
                let t: Vec<usize> = slots.iter().map(|&s| self.value[s]).collect();
                self.b.apply(f, &t) == self.value[*v]
            }
        })
    }

    fn current(&self) -> Homomorphism {
        Homomorphism {
            source: self.a.name.clone(),
            target: self.b.name.clone(),
            maps: self
                .sorts
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let lo = self.offset[i];
                    (s.clone(), self.value[lo..lo + self.a.size(s)].to_vec())
                })
                .collect(),
        }
    }

    fn run<F: FnMut(Homomorphism) -> ControlFlow<()>>(
        &mut self,
        k: usize,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if k == self.value.len() {
            return visit(self.current());
        }
        let range = match self.fixed[k] {
            Some(v) => v..v + 1,
            None => 0..self.b.size(&self.sorts[self.slot_sort[k]]),
        };
        for v in range {
            self.value[k] = v;
            if self.ok_at(k) {
                self.run(k + 1, visit)?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Visits homomorphisms `a -> b` extending `fixed`, in lexicographic order of
/// the per-sort tables.
pub fn for_each_hom<F>(
    a: &FiniteStructure,
    b: &FiniteStructure,
    fixed: &BTreeMap<Sym, BTreeMap<usize, usize>>,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(Homomorphism) -> ControlFlow<()>,
{
    check_signatures(a, b)?;
    if let Some(mut s) = Search::new(a, b, fixed) {
        let _ = s.run(0, &mut visit);
    }
    Ok(())
}

/// All homomorphisms `a -> b`.
pub fn homomorphisms(a: &FiniteStructure, b: &FiniteStructure) -> Result<Vec<Homomorphism>> {
    let mut out = Vec::new();
    for_each_hom(a, b, &BTreeMap::new(), |h| {
        out.push(h);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// First homomorphism `a -> b` extending `fixed`.
pub fn first_hom(
    a: &FiniteStructure,
    b: &FiniteStructure,
    fixed: &BTreeMap<Sym, BTreeMap<usize, usize>>,
) -> Result<Option<Homomorphism>> {
    let mut found = None;
    for_each_hom(a, b, fixed, |h| {
        found = Some(h);
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Positive formula true in the target and false in the source, with the
/// source elements its variables denote.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub formula: Formula,
    pub vars: Vec<Var>,
    /// `(sort, element)` of the source assigned to each variable.
    pub elements: Vec<(Sym, usize)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ImmersionVerdict {
    pub immersion: bool,
    /// `g: target -> source` with `g . f = id` when the map is an immersion.
    pub retraction: Option<Homomorphism>,
    /// Present on failure when the bounded search finds one.
    pub witness: Option<Witness>,
}

/// Depth bound of the witness search on non-immersions.
pub const WITNESS_DEPTH: usize = 3;

/// Per-enumeration ceiling of the witness search; larger supplies are
/// skipped in favour of [`diagram_witness`].
pub const WITNESS_CEILING: usize = 5_000;

/// Decides whether `f: a -> b` reflects all positive formulas, via the
/// existence of a retraction `g: b -> a` with `g . f = id`.
pub fn is_immersion(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
) -> Result<ImmersionVerdict> {
    match retraction(a, b, f)? {
        Some(g) => Ok(ImmersionVerdict {
            immersion: true,
            retraction: Some(g),
            witness: None,
        }),
        None => Ok(failure(a, b, f)),
    }
}

/// A homomorphism `g: b -> a` with `g . f = id`, without a witness search
/// on failure.
pub fn retraction(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
) -> Result<Option<Homomorphism>> {
    check_signatures(a, b)?;
    let mut fixed: BTreeMap<Sym, BTreeMap<usize, usize>> = BTreeMap::new();
    for (s, m) in &f.maps {
        let entry = fixed.entry(s.clone()).or_default();
        for (e, &fe) in m.iter().enumerate() {
            if let Some(&prev) = entry.get(&fe) {
                if prev != e {
                    return Ok(None);
                }
            }
            entry.insert(fe, e);
        }
    }
    first_hom(b, a, &fixed)
}

fn failure(a: &FiniteStructure, b: &FiniteStructure, f: &Homomorphism) -> ImmersionVerdict {
    ImmersionVerdict {
        immersion: false,
        retraction: None,
        witness: find_witness(
            a,
            b,
            f,
            WITNESS_DEPTH,
            Limits::from_env().with_ceiling(WITNESS_CEILING),
        )
        .or_else(|| diagram_witness(a, b, f)),
    }
}

/// Searches positive formulas by increasing depth, then tuple length, for one
/// true at `f(t)` in `b` and false at `t` in `a`. Enumerations that hit the
/// ceiling are skipped.
pub fn find_witness(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
    max_depth: usize,
    limits: Limits,
) -> Option<Witness> {
    let elems: Vec<(Sym, usize)> = a
        .carriers()
        .iter()
        .flat_map(|(s, c)| (0..c.len()).map(move |e| (s.clone(), e)))
        .collect();
    let mut cache: HashMap<(usize, Vec<Var>), Option<Vec<Formula>>> = HashMap::new();
    for d in 0..=max_depth {
        for k in 0..=elems.len() {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let chosen: Vec<(Sym, usize)> = idx.iter().map(|&i| elems[i].clone()).collect();
                let mut counts: BTreeMap<Sym, u32> = BTreeMap::new();
                let vars: Vec<Var> = chosen
                    .iter()
                    .map(|(s, _)| {
                        let c = counts.entry(s.clone()).or_insert(0);
                        *c += 1;
                        Var::new(s.clone(), *c - 1)
                    })
                    .collect();
                let formulas = cache
                    .entry((d, vars.clone()))
                    .or_insert_with(|| enumerate_positive(&a.signature, &vars, d, limits).ok());
                if let Some(fs) = formulas {
                    let ta: Vec<usize> = chosen.iter().map(|(_, e)| *e).collect();
                    let tb: Vec<usize> = chosen.iter().map(|(s, e)| f.apply(s, *e)).collect();
                    if let Some(phi) = fs
                        .iter()
                        .find(|phi| eval_at(b, phi, &vars, &tb) && !eval_at(a, phi, &vars, &ta))
                    {
                        return Some(Witness {
                            formula: phi.clone(),
                            vars,
                            elements: chosen,
                        });
                    }
                }
                if k == 0 || !crate::logic::enumerate::next_combination(&mut idx, elems.len()) {
                    break;
                }
            }
        }
    }
    None
}

#[derive(Clone)]
enum Fact {
    Rel(Sym, Vec<(Sym, usize)>),
    Fun(Sym, Vec<(Sym, usize)>, (Sym, usize)),
    Const(Sym, (Sym, usize)),
}

/// A pp witness read off the positive diagram of `b`, pruned greedily to a
/// minimal set of atoms. Elements of `b` outside the image of `f` become
/// existential variables. `None` exactly when `f` has a retraction.
pub fn diagram_witness(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &Homomorphism,
) -> Option<Witness> {
    for (s, m) in &f.maps {
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if m[i] == m[j] {
                    let vars = vec![Var::new(s.clone(), 0), Var::new(s.clone(), 1)];
                    return Some(Witness {
                        formula: Formula::eq(
                            Term::Var(vars[0].clone()),
                            Term::Var(vars[1].clone()),
                        ),
                        vars,
                        elements: vec![(s.clone(), i), (s.clone(), j)],
                    });
                }
            }
        }
    }
    let sig = &b.signature;
    let mut facts = Vec::new();
    for (r, sorting) in sig.relations() {
        for t in b
            .relation(r)
            .map(|t| t.tuples().clone())
            .unwrap_or_default()
        {
            facts.push(Fact::Rel(
                r.clone(),
                sorting.iter().cloned().zip(t).collect(),
            ));
        }
    }
    for (fun, (arity, res)) in sig.functions() {
        for (args, v) in b.function_table(fun) {
            facts.push(Fact::Fun(
                fun.clone(),
                arity.iter().cloned().zip(args).collect(),
                (res.clone(), v),
            ));
        }
    }
    for (c, s) in sig.constants() {
        facts.push(Fact::Const(c.clone(), (s.clone(), b.constant(c))));
    }
    let refutes = |w: &Witness| {
        let ta: Vec<usize> = w.elements.iter().map(|(_, e)| *e).collect();
        !eval_at(a, &w.formula, &w.vars, &ta)
    };
    let mut keep = vec![true; facts.len()];
    if !refutes(&from_facts(f, &facts, &keep)) {
        return None;
    }
    for i in 0..facts.len() {
        keep[i] = false;
        if !refutes(&from_facts(f, &facts, &keep)) {
            keep[i] = true;
        }
    }
    let mut w = from_facts(f, &facts, &keep);
    w.formula = canonicalize(&w.formula);
    Some(w)
}

fn from_facts(f: &Homomorphism, facts: &[Fact], keep: &[bool]) -> Witness {
    let pre: BTreeMap<(Sym, usize), usize> = f
        .maps
        .iter()
        .flat_map(|(s, m)| {
            m.iter()
                .enumerate()
                .map(move |(e, &fe)| ((s.clone(), fe), e))
        })
        .collect();
    let kept: Vec<&Fact> = facts
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(x, _)| x)
        .collect();
    let mut nodes: BTreeSet<(Sym, usize)> = BTreeSet::new();
    for x in &kept {
        let ns: Vec<&(Sym, usize)> = match x {
            Fact::Rel(_, ns) => ns.iter().collect(),
            Fact::Fun(_, ns, v) => ns.iter().chain([v]).collect(),
            Fact::Const(_, v) => vec![v],
        };
        for n in ns {
            nodes.insert(n.clone());
        }
    }
    let mut params: Vec<(Sym, usize)> = nodes
        .iter()
        .filter_map(|n| pre.get(n).map(|&e| (n.0.clone(), e)))
        .collect();
    params.sort();
    let mut count: BTreeMap<Sym, u32> = BTreeMap::new();
    let mut var_of: BTreeMap<(Sym, usize), Var> = BTreeMap::new();
    let mut vars = Vec::new();
    for (s, e) in &params {
        let c = count.entry(s.clone()).or_insert(0);
        let v = Var::new(s.clone(), *c);
        *c += 1;
        var_of.insert((s.clone(), f.apply(s, *e)), v.clone());
        vars.push(v);
    }
    let mut extra = Vec::new();
    for n in &nodes {
        if !var_of.contains_key(n) {
            let c = count.entry(n.0.clone()).or_insert(0);
            let v = Var::new(n.0.clone(), *c);
            *c += 1;
            var_of.insert(n.clone(), v.clone());
            extra.push(v);
        }
    }
    let t = |n: &(Sym, usize)| Term::Var(var_of[n].clone());
    let atoms = kept.iter().map(|x| match x {
        Fact::Rel(r, ns) => Formula::Atom(r.clone(), ns.iter().map(t).collect()),
        Fact::Fun(g, ns, v) => Formula::eq(Term::App(g.clone(), ns.iter().map(t).collect()), t(v)),
        Fact::Const(c, v) => Formula::eq(Term::Const(c.clone()), t(v)),
    });
    Witness {
        formula: Formula::exists_all(extra, Formula::and(atoms)),
        vars,
        elements: params,
    }
}

/// Isomorphism test by search for a bijective homomorphism with matching
/// relation sizes.
pub fn find_isomorphism(a: &FiniteStructure, b: &FiniteStructure) -> Result<Option<Homomorphism>> {
    check_signatures(a, b)?;
    if a.carriers().iter().any(|(s, c)| c.len() != b.size(s)) {
        return Ok(None);
    }
    for r in a.signature.relations().keys() {
        let na = a.relation(r).map_or(0, |t| t.tuples().len());
        let nb = b.relation(r).map_or(0, |t| t.tuples().len());
        if na != nb {
            return Ok(None);
        }
    }
    let mut found = None;
    for_each_hom(a, b, &BTreeMap::new(), |h| {
        if h.is_injective() {
            found = Some(h);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

pub fn is_isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> Result<bool> {
    Ok(find_isomorphism(a, b)?.is_some())
}
