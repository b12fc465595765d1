//! Geometric Morleyisation: a fragment `F` of formulas is compiled into new
//! relation symbols `R_phi` with g-inductive axioms forcing each `R_phi` to
//! track `phi`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::logic::syntax::name_index;
use crate::logic::{
    canonicalize, classify_unchecked, enumerate_first_order, Connective, Formula, Signature, Sym,
    Term, Theory, TheoryKind, Var,
};
use crate::semantics::class::same_symbols;
use crate::semantics::eval::{eval_at, extension, satisfies, sorting};
use crate::semantics::{all_tuples, is_homomorphism, FiniteStructure};
use crate::text::{print_formula, print_signature};

/// A finite set of canonical formulas closed under immediate subformulas
/// and under the negations the axiom clauses refer to. Members are indexed
/// subformulas first.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub signature: Arc<Signature>,
    members: Vec<Formula>,
    free: Vec<Vec<Var>>,
    index: HashMap<Formula, usize>,
    prefix: String,
}

/// Canonical form with `forall` and `->` rewritten into `!`, `exists`, `|`.
pub fn normalize(f: &Formula) -> Formula {
    fn go(f: &Formula) -> Formula {
        match f {
            Formula::And(cs) => Formula::And(cs.iter().map(go).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(go).collect()),
            Formula::Not(c) => Formula::not(go(c)),
            Formula::Implies(a, b) => Formula::or([Formula::not(go(a)), go(b)]),
            Formula::Exists(v, b) => Formula::exists(v.clone(), go(b)),
            Formula::Forall(v, b) => Formula::not(Formula::exists(v.clone(), Formula::not(go(b)))),
            _ => f.clone(),
        }
    }
    canonicalize(&go(&canonicalize(f)))
}

/// Fresh relation-name prefix: `R_`, lengthened until no symbol of `sig`
/// could collide with a generated name.
fn fresh_prefix(sig: &Signature) -> String {
    let names: Vec<&str> = sig
        .relations()
        .keys()
        .chain(sig.functions().keys())
        .chain(sig.constants().keys())
        .map(|s| s.as_str())
        .collect();
    let mut p = "R_".to_string();
    while names.iter().any(|n| {
        n.strip_prefix(p.as_str())
            .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        p.push('_');
    }
    debug_assert!(name_index(&format!("{p}0")).is_none());
    p
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Formula] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Formula {
        &self.members[i]
    }

    /// Index of a formula, after normalization.
    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(&normalize(f)).copied()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index_of(f).is_some()
    }

    /// The free tuple of member `i`, in canonical variable order.
    pub fn free_tuple(&self, i: usize) -> &[Var] {
        &self.free[i]
    }

    pub fn symbol(&self, i: usize) -> Sym {
        Sym::new(&format!("{}{i}", self.prefix))
    }

    /// `R_i` applied to the free tuple of member `i`.
    pub fn relation_atom(&self, i: usize) -> Formula {
        Formula::atom(self.symbol(i), self.free[i].iter().map(Term::var).collect())
    }

    /// Index of the negation of member `i`, when present.
    pub fn negation_of(&self, i: usize) -> Option<usize> {
        self.index
            .get(&canonicalize(&Formula::not(self.members[i].clone())))
            .copied()
    }

    fn lookup(&self, f: &Formula) -> usize {
        self.index[&canonicalize(f)]
    }
}

/// Least fragment over `sig` containing the normalized seed.
pub fn close_fragment(
    sig: Arc<Signature>,
    seed: impl IntoIterator<Item = Formula>,
    limits: Limits,
) -> Result<Fragment> {
    let mut found: BTreeSet<Formula> = BTreeSet::new();
    let mut work: Vec<Formula> = Vec::new();
    for f in seed {
        sig.check(&f)?;
        work.push(normalize(&f));
    }
    while let Some(f) = work.pop() {
        if found.contains(&f) {
            continue;
        }
        if found.len() >= limits.ceiling {
            return Err(Error::ResourceCeiling {
                what: "fragment members".into(),
                limit: limits.ceiling,
            });
        }
        work.extend(f.children().into_iter().map(canonicalize));
        if !matches!(f, Formula::Not(_)) {
            work.push(canonicalize(&Formula::not(f.clone())));
        }
        if let Formula::And(cs) = &f {
            work.extend(cs.iter().map(|c| canonicalize(&Formula::not(c.clone()))));
        }
        found.insert(f);
    }
    let mut members: Vec<Formula> = found.into_iter().collect();
    members.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    let index = members
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let free = members
        .iter()
        .map(|f| f.free_vars().into_iter().collect())
        .collect();
    Ok(Fragment {
        prefix: fresh_prefix(&sig),
        signature: sig,
        members,
        free,
        index,
    })
}

/// The theory's sentences together with every enumerated first-order
/// formula of depth `<= d` in `vars`, closed.
pub fn depth_fragment(t: &Theory, vars: &[Var], d: usize, limits: Limits) -> Result<Fragment> {
    let mut seed: Vec<Formula> = t.sentences.iter().cloned().collect();
    seed.extend(enumerate_first_order(&t.signature, vars, d, limits)?);
    close_fragment(t.signature.clone(), seed, limits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Clause {
    pub const ALL: [Clause; 6] = [
        Clause::I,
        Clause::II,
        Clause::III,
        Clause::IV,
        Clause::V,
        Clause::VI,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::V => "v",
            Clause::VI => "vi",
        }
    }
}

/// `forall vars: body`, emitted for fragment member `member`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axiom {
    pub clause: Clause,
    pub member: usize,
    pub vars: Vec<Var>,
    pub body: Formula,
}

impl Axiom {
    pub fn sentence(&self) -> Formula {
        Formula::forall_all(self.vars.iter().cloned(), self.body.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorleyizedTheory {
    pub source: Arc<Theory>,
    pub fragment: Fragment,
    /// The base signature plus one relation per fragment member.
    pub signature: Arc<Signature>,
    /// Ordered by fragment index, then clause.
    pub axioms: Vec<Axiom>,
}

fn extended_signature(f: &Fragment) -> Result<Signature> {
    let base = &f.signature;
    let mut sig = base.as_ref().clone();
    sig.name = if base.name.is_empty() {
        String::new()
    } else {
        format!("{}_G", base.name)
    };
    for i in 0..f.len() {
        sig.add_relation_syms(f.symbol(i).as_str(), sorting(f.free_tuple(i)))?;
    }
    Ok(sig)
}

pub fn morleyize(t: &Arc<Theory>, f: &Fragment) -> Result<MorleyizedTheory> {
    if !same_symbols(&t.signature, &f.signature) {
        return Err(Error::SignatureMismatch(format!(
            "theory `{}` and the fragment are over different signatures",
            t.name
        )));
    }
    let mut sentences = BTreeSet::new();
    for s in &t.sentences {
        sentences.insert(
            f.index_of(s)
                .ok_or_else(|| Error::FragmentCoverage(s.to_string()))?,
        );
    }
    let signature = Arc::new(extended_signature(f)?);
    let mut axioms = Vec::new();
    for (i, phi) in f.members().iter().enumerate() {
        let x = f.free_tuple(i).to_vec();
        let r = f.relation_atom(i);
        let mut emit = |clause: Clause, a: Formula, b: Formula| {
            axioms.push(Axiom {
                clause,
                member: i,
                vars: x.clone(),
                body: Formula::implies(a, b),
            })
        };
        match phi {
            _ if phi.is_atomic() => {
                emit(Clause::I, phi.clone(), r.clone());
                emit(Clause::I, r.clone(), phi.clone());
            }
            Formula::Or(cs) => {
                let rs = Formula::Or(cs.iter().map(|c| f.relation_atom(f.lookup(c))).collect());
                emit(Clause::II, r.clone(), rs.clone());
                emit(Clause::II, rs, r.clone());
            }
            _ => {}
        }
        if let Some(n) = f.negation_of(i) {
            let rn = f.relation_atom(n);
            emit(
                Clause::III,
                Formula::And([r.clone(), rn.clone()].into()),
                Formula::False,
            );
            emit(
                Clause::III,
                Formula::True,
                Formula::Or([r.clone(), rn].into()),
            );
        }
        match phi {
            Formula::And(cs) => {
                let atoms: Vec<Formula> = cs
                    .iter()
                    .map(|c| f.relation_atom(f.lookup(&Formula::not(c.clone()))))
                    .collect();
                let negs = Formula::Or(atoms.iter().cloned().collect());
                emit(
                    Clause::IV,
                    Formula::And([r.clone(), negs].into()),
                    Formula::False,
                );
                // Flat, as the parser reads it.
                let total = Formula::Or(std::iter::once(r.clone()).chain(atoms).collect());
                emit(Clause::IV, Formula::True, total);
            }
            Formula::Exists(y, body) => {
                let inner = Formula::exists(y.clone(), f.relation_atom(f.lookup(body)));
                emit(Clause::V, r.clone(), inner.clone());
                emit(Clause::V, inner, r.clone());
            }
            _ => {}
        }
        if sentences.contains(&i) {
            axioms.push(Axiom {
                clause: Clause::VI,
                member: i,
                vars: Vec::new(),
                body: r,
            });
        }
    }
    debug_assert!(axioms
        .iter()
        .all(|a| classify_unchecked(&a.sentence()).g_inductive_basic));
    Ok(MorleyizedTheory {
        source: t.clone(),
        fragment: f.clone(),
        signature,
        axioms,
    })
}

impl MorleyizedTheory {
    pub fn clause(&self, c: Clause) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(move |a| a.clause == c)
    }

    pub fn name(&self) -> String {
        format!("{}_G", self.source.name)
    }

    pub fn theory(&self) -> Result<Theory> {
        Theory::new(
            &self.name(),
            self.signature.clone(),
            self.axioms.iter().map(|a| canonicalize(&a.sentence())),
            Some(TheoryKind::GInductive),
        )
    }

    /// `.plt` text of the extended signature and the axioms, each preceded
    /// by a comment naming its clause and relation.
    pub fn to_plt(&self) -> String {
        let sig = &self.signature;
        let mut out = String::from("#poslog v1 theory\n");
        out.push_str(&print_signature(sig));
        let over = if sig.name.is_empty() {
            String::new()
        } else {
            format!(" over {}", sig.name)
        };
        let _ = writeln!(
            out,
            "theory {} : {}{over} {{",
            self.name(),
            TheoryKind::GInductive.label()
        );
        for a in &self.axioms {
            let _ = writeln!(
                out,
                "  # clause ({}) {} := {}",
                a.clause.label(),
                self.fragment.symbol(a.member),
                print_formula(&self.fragment.signature, self.fragment.get(a.member))
            );
            let _ = writeln!(out, "  axiom {};", print_formula(sig, &a.sentence()));
        }
        out.push_str("}\n");
        out
    }

    fn check_base(&self, m: &FiniteStructure) -> Result<()> {
        if !same_symbols(&m.signature, &self.fragment.signature) {
            return Err(Error::SignatureMismatch(format!(
                "`{}` is not over the signature of `{}`",
                m.name, self.source.name
            )));
        }
        Ok(())
    }
}

fn tables(f: &Fragment, m: &FiniteStructure) -> Vec<BTreeSet<Vec<usize>>> {
    (0..f.len())
        .map(|i| {
            extension(m, f.get(i), f.free_tuple(i))
                .into_iter()
                .collect()
        })
        .collect()
}

fn expand_with(
    mt: &MorleyizedTheory,
    m: &FiniteStructure,
    tables: &[BTreeSet<Vec<usize>>],
) -> Result<FiniteStructure> {
    let mut rels: BTreeMap<Sym, BTreeSet<Vec<usize>>> = m
        .signature
        .relations()
        .keys()
        .map(|r| {
            (
                r.clone(),
                m.relation(r)
                    .map(|t| t.tuples().clone())
                    .unwrap_or_default(),
            )
        })
        .collect();
    for (i, t) in tables.iter().enumerate() {
        rels.insert(mt.fragment.symbol(i), t.clone());
    }
    m.rebuild(&m.name, mt.signature.clone(), rels)
}

fn check_model(mt: &MorleyizedTheory, m: &FiniteStructure) -> Result<()> {
    mt.check_base(m)?;
    match mt.source.sentences.iter().find(|s| !satisfies(m, s)) {
        Some(s) => Err(Error::NotAModel {
            structure: m.name.clone(),
            axiom: print_formula(&m.signature, s),
        }),
        None => Ok(()),
    }
}

/// The canonical expansion: `R_phi` is read as the extension of `phi`.
pub fn expand(mt: &MorleyizedTheory, m: &FiniteStructure) -> Result<FiniteStructure> {
    check_model(mt, m)?;
    expand_with(mt, m, &tables(&mt.fragment, m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomViolation {
    pub clause: Clause,
    pub member: usize,
    pub sentence: Formula,
    /// First tuple of the axiom's variables falsifying its body.
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseViolation {
    pub member: usize,
    /// The induction case: head connective of the member.
    pub case: Connective,
    pub tuple: Vec<usize>,
    pub relation: bool,
    pub formula: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ReductReport {
    pub axioms_checked: usize,
    pub axiom_violations: Vec<AxiomViolation>,
    pub pointwise_checked: usize,
    pub pointwise_violations: Vec<PointwiseViolation>,
    /// Theory sentences false in the reduct.
    pub theory_violations: Vec<Formula>,
}

impl ReductReport {
    pub fn passed(&self) -> bool {
        self.axiom_violations.is_empty()
            && self.pointwise_violations.is_empty()
            && self.theory_violations.is_empty()
    }
}

/// Checks `n` against every axiom, then `R_phi <-> phi` at every tuple of
/// every member, then the theory in the reduct.
pub fn reduct_check(mt: &MorleyizedTheory, n: &FiniteStructure) -> Result<ReductReport> {
    if !same_symbols(&n.signature, &mt.signature) {
        return Err(Error::SignatureMismatch(format!(
            "`{}` is not over the signature of `{}`",
            n.name,
            mt.name()
        )));
    }
    let mut r = ReductReport::default();
    for a in &mt.axioms {
        r.axioms_checked += 1;
        if let Some(t) = n
            .tuples(&sorting(&a.vars))
            .into_iter()
            .find(|t| !eval_at(n, &a.body, &a.vars, t))
        {
            r.axiom_violations.push(AxiomViolation {
                clause: a.clause,
                member: a.member,
                sentence: a.sentence(),
                tuple: t,
            });
        }
    }
    let base = n.reduct(mt.fragment.signature.clone())?;
    let f = &mt.fragment;
    for (i, phi) in f.members().iter().enumerate() {
        let rel = f.symbol(i);
        for t in base.tuples(&sorting(f.free_tuple(i))) {
            r.pointwise_checked += 1;
            let (relation, formula) = (n.holds(&rel, &t), eval_at(&base, phi, f.free_tuple(i), &t));
            if relation != formula {
                r.pointwise_violations.push(PointwiseViolation {
                    member: i,
                    case: phi.head(),
                    tuple: t,
                    relation,
                    formula,
                });
            }
        }
    }
    r.theory_violations = mt
        .source
        .sentences
        .iter()
        .filter(|s| !satisfies(&base, s))
        .cloned()
        .collect();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorVerdict {
    /// The map is a homomorphism between the expansions.
    pub homomorphism: bool,
    /// The map preserves every fragment member.
    pub elementary: bool,
    /// A member and tuple whose truth is not carried along.
    pub witness: Option<(usize, Vec<usize>)>,
}

impl FunctorVerdict {
    pub fn agrees(&self) -> bool {
        self.homomorphism == self.elementary
    }
}

fn check_map(
    m: &FiniteStructure,
    n: &FiniteStructure,
    maps: &BTreeMap<Sym, Vec<usize>>,
) -> Result<()> {
    for s in m.signature.sorts() {
        let ok = maps
            .get(s)
            .is_some_and(|v| v.len() == m.size(s) && v.iter().all(|&e| e < n.size(s)));
        if !ok {
            return Err(Error::IllSorted(format!(
                "map is not a sorted map on sort {s}"
            )));
        }
    }
    Ok(())
}

fn apply(vars: &[Var], maps: &BTreeMap<Sym, Vec<usize>>, t: &[usize]) -> Vec<usize> {
    vars.iter().zip(t).map(|(v, &e)| maps[&v.sort][e]).collect()
}

/// Compares the homomorphism test on the expansions with direct evaluation
/// of every member at every tuple and its image.
pub fn functor_check(
    mt: &MorleyizedTheory,
    maps: &BTreeMap<Sym, Vec<usize>>,
    m: &FiniteStructure,
    n: &FiniteStructure,
) -> Result<FunctorVerdict> {
    check_map(m, n, maps)?;
    let (em, en) = (expand(mt, m)?, expand(mt, n)?);
    let homomorphism = is_homomorphism(&em, &en, maps);
    let f = &mt.fragment;
    let mut witness = None;
    'members: for (i, phi) in f.members().iter().enumerate() {
        let x = f.free_tuple(i);
        for t in m.tuples(&sorting(x)) {
            if eval_at(m, phi, x, &t) && !eval_at(n, phi, x, &apply(x, maps, &t)) {
                witness = Some((i, t));
                break 'members;
            }
        }
    }
    Ok(FunctorVerdict {
        homomorphism,
        elementary: witness.is_none(),
        witness,
    })
}

/// Every sorted map from `m` to `n`.
pub fn sorted_maps(m: &FiniteStructure, n: &FiniteStructure) -> Vec<BTreeMap<Sym, Vec<usize>>> {
    let mut out = vec![BTreeMap::new()];
    for s in m.signature.sorts() {
        let funs = all_tuples(&vec![n.size(s); m.size(s)]);
        out = out
            .into_iter()
            .flat_map(|acc| {
                funs.iter().map(move |g| {
                    let mut acc = acc.clone();
                    acc.insert(s.clone(), g.clone());
                    acc
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct FunctorSuiteReport {
    pub maps: usize,
    pub homomorphisms: usize,
    /// `(source, target, map)` where the two sides disagree.
    pub disagreements: Vec<(String, String, BTreeMap<Sym, Vec<usize>>)>,
}

impl FunctorSuiteReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// [`functor_check`] over every sorted map between every pair of models,
/// with member tables computed once per model.
pub fn functor_suite(
    mt: &MorleyizedTheory,
    models: &[FiniteStructure],
) -> Result<FunctorSuiteReport> {
    let f = &mt.fragment;
    let mut cached = Vec::new();
    for m in models {
        check_model(mt, m)?;
        let t = tables(f, m);
        cached.push((expand_with(mt, m, &t)?, t));
    }
    let mut r = FunctorSuiteReport::default();
    for (m, (em, tm)) in models.iter().zip(&cached) {
        for (n, (en, tn)) in models.iter().zip(&cached) {
            for maps in sorted_maps(m, n) {
                r.maps += 1;
                let hom = is_homomorphism(em, en, &maps);
                r.homomorphisms += usize::from(hom);
                let elementary = tm.iter().zip(tn).enumerate().all(|(i, (a, b))| {
                    a.iter()
                        .all(|t| b.contains(&apply(f.free_tuple(i), &maps, t)))
                });
                if hom != elementary {
                    r.disagreements.push((m.name.clone(), n.name.clone(), maps));
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests;
