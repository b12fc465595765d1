//! Many-sorted syntax: signatures, sorted variables, terms and formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An interned symbol name (sort, relation, function or constant).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

const VAR_NAMES: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

/// A variable `(sort, index)`; distinct pairs are distinct variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub sort: Sym,
    pub index: u32,
}

impl Var {
    pub fn new(sort: impl Into<Sym>, index: u32) -> Self {
        Var {
            sort: sort.into(),
            index,
        }
    }

    /// Printed name: `x y z w u v`, then `x6`, `x7`, ...
    pub fn name(&self) -> String {
        index_name(self.index)
    }
}

pub fn index_name(index: u32) -> String {
    match VAR_NAMES.get(index as usize) {
        Some(n) => (*n).to_string(),
        None => format!("x{index}"),
    }
}

/// Inverse of [`index_name`]; `None` for names outside the variable scheme.
pub fn name_index(name: &str) -> Option<u32> {
    if let Some(i) = VAR_NAMES.iter().position(|n| *n == name) {
        return Some(i as u32);
    }
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    Const(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(v)),
        }
    }

    pub fn max_index(&self, sort: &Sym) -> Option<u32> {
        match self {
            Term::Var(v) if &v.sort == sort => Some(v.index),
            Term::Var(_) | Term::Const(_) => None,
            Term::App(_, args) => args.iter().filter_map(|a| a.max_index(sort)).max(),
        }
    }
}

/// Formulas of the infinitary language at desk scale: conjunctions and
/// disjunctions range over explicit finite sets.
///
/// The derived order is the canonical structural order used everywhere a
/// deterministic choice is needed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Atom(Sym, Vec<Term>),
    And(BTreeSet<Formula>),
    Or(BTreeSet<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: impl Into<Sym>, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.into(), args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    /// Set-arity conjunction; the empty conjunction is `true`.
    pub fn and(children: impl IntoIterator<Item = Formula>) -> Formula {
        let set: BTreeSet<Formula> = children.into_iter().collect();
        if set.is_empty() {
            Formula::True
        } else {
            Formula::And(set)
        }
    }

    /// Set-arity disjunction; the empty disjunction is `false`.
    pub fn or(children: impl IntoIterator<Item = Formula>) -> Formula {
        let set: BTreeSet<Formula> = children.into_iter().collect();
        if set.is_empty() {
            Formula::False
        } else {
            Formula::Or(set)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    /// `forall v1 ... vn: body`, outermost binder first.
    pub fn forall_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Atom(..)
        )
    }

    /// Free variables in canonical order.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    let mut vs = BTreeSet::new();
                    t.collect_vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
            }
            Formula::Atom(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().for_each(|c| c.collect_free(bound, out))
            }
            Formula::Not(c) => c.collect_free(bound, out),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable occurring in the formula, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) => {
                a.collect_vars(&mut out);
                b.collect_vars(&mut out);
            }
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_vars(&mut out)),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.visit(f)),
            Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => c.visit(f),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(cs) | Formula::Or(cs) => cs.iter().collect(),
            Formula::Not(c) | Formula::Exists(_, c) | Formula::Forall(_, c) => vec![c],
            Formula::Implies(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Head connective, used to bucket per-connective reports.
    pub fn head(&self) -> Connective {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Atom(..) => {
                Connective::Atomic
            }
            Formula::And(_) => Connective::And,
            Formula::Or(_) => Connective::Or,
            Formula::Not(_) => Connective::Not,
            Formula::Implies(..) => Connective::Implies,
            Formula::Exists(..) => Connective::Exists,
            Formula::Forall(..) => Connective::Forall,
        }
    }

    pub fn max_var_index(&self, sort: &Sym) -> Option<u32> {
        let mut best: Option<u32> = None;
        for v in self.all_vars() {
            if &v.sort == sort {
                best = Some(best.map_or(v.index, |b| b.max(v.index)));
            }
        }
        best
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Connective {
    Atomic,
    And,
    Or,
    Not,
    Implies,
    Exists,
    Forall,
}

impl Connective {
    pub fn label(self) -> &'static str {
        match self {
            Connective::Atomic => "atomic",
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Not => "not",
            Connective::Implies => "implies",
            Connective::Exists => "exists",
            Connective::Forall => "forall",
        }
    }
}

/// A many-sorted signature. `true` and `false` are the two built-in nullary
/// relations and cannot be declared.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Signature {
    pub name: String,
    sorts: BTreeSet<Sym>,
    relations: BTreeMap<Sym, Vec<Sym>>,
    functions: BTreeMap<Sym, (Vec<Sym>, Sym)>,
    constants: BTreeMap<Sym, Sym>,
}

const RESERVED: [&str; 4] = ["true", "false", "And", "Or"];

impl Signature {
    pub fn new(name: &str) -> Self {
        Signature {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if RESERVED.contains(&name) {
            return Err(Error::InvalidSignature(format!(
                "`{name}` is built in and cannot be redeclared"
            )));
        }
        if name_index(name).is_some() {
            return Err(Error::InvalidSignature(format!(
                "`{name}` is a variable name and cannot name a symbol"
            )));
        }
        let s = Sym::new(name);
        if self.relations.contains_key(&s)
            || self.functions.contains_key(&s)
            || self.constants.contains_key(&s)
        {
            return Err(Error::InvalidSignature(format!("`{name}` declared twice")));
        }
        Ok(())
    }

    fn check_sorts(&self, sorts: &[Sym]) -> Result<()> {
        match sorts.iter().find(|s| !self.sorts.contains(*s)) {
            Some(s) => Err(Error::InvalidSignature(format!("undeclared sort `{s}`"))),
            None => Ok(()),
        }
    }

    pub fn add_sort(&mut self, name: &str) -> Result<()> {
        if RESERVED.contains(&name) {
            return Err(Error::InvalidSignature(format!("`{name}` is reserved")));
        }
        if !self.sorts.insert(Sym::new(name)) {
            return Err(Error::InvalidSignature(format!(
                "sort `{name}` declared twice"
            )));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, sorting: &[&str]) -> Result<()> {
        let sorting: Vec<Sym> = sorting.iter().map(|s| Sym::new(s)).collect();
        self.add_relation_syms(name, sorting)
    }

    pub fn add_relation_syms(&mut self, name: &str, sorting: Vec<Sym>) -> Result<()> {
        self.check_fresh(name)?;
        self.check_sorts(&sorting)?;
        self.relations.insert(Sym::new(name), sorting);
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: &[&str], result: &str) -> Result<()> {
        self.check_fresh(name)?;
        let arity: Vec<Sym> = arity.iter().map(|s| Sym::new(s)).collect();
        self.check_sorts(&arity)?;
        self.check_sorts(&[Sym::new(result)])?;
        self.functions
            .insert(Sym::new(name), (arity, Sym::new(result)));
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, sort: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.check_sorts(&[Sym::new(sort)])?;
        self.constants.insert(Sym::new(name), Sym::new(sort));
        Ok(())
    }

    pub fn sorts(&self) -> &BTreeSet<Sym> {
        &self.sorts
    }

    pub fn relations(&self) -> &BTreeMap<Sym, Vec<Sym>> {
        &self.relations
    }

    pub fn functions(&self) -> &BTreeMap<Sym, (Vec<Sym>, Sym)> {
        &self.functions
    }

    pub fn constants(&self) -> &BTreeMap<Sym, Sym> {
        &self.constants
    }

    pub fn relation(&self, name: &Sym) -> Option<&[Sym]> {
        self.relations.get(name).map(|v| v.as_slice())
    }

    pub fn is_single_sorted(&self) -> bool {
        self.sorts.len() <= 1
    }

    /// The only sort, when there is exactly one.
    pub fn default_sort(&self) -> Option<&Sym> {
        if self.sorts.len() == 1 {
            self.sorts.iter().next()
        } else {
            None
        }
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    pub fn term_sort(&self, t: &Term) -> Result<Sym> {
        match t {
            Term::Var(v) => {
                if self.sorts.contains(&v.sort) {
                    Ok(v.sort.clone())
                } else {
                    Err(Error::IllSorted(format!(
                        "variable {v} has undeclared sort {}",
                        v.sort
                    )))
                }
            }
            Term::Const(c) => self
                .constants
                .get(c)
                .cloned()
                .ok_or_else(|| Error::Undeclared(c.to_string())),
            Term::App(f, args) => {
                let (arity, result) = self
                    .functions
                    .get(f)
                    .ok_or_else(|| Error::Undeclared(f.to_string()))?;
                self.check_args(f, arity, args)?;
                Ok(result.clone())
            }
        }
    }

    fn check_args(&self, name: &Sym, expected: &[Sym], args: &[Term]) -> Result<()> {
        if expected.len() != args.len() {
            return Err(Error::IllSorted(format!(
                "`{name}` expects {} arguments, got {}",
                expected.len(),
                args.len()
            )));
        }
        for (s, t) in expected.iter().zip(args) {
            let found = self.term_sort(t)?;
            if &found != s {
                return Err(Error::SortMismatch {
                    expected: s.to_string(),
                    found: found.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Well-sortedness against this signature.
    pub fn check(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) => {
                let (sa, sb) = (self.term_sort(a)?, self.term_sort(b)?);
                if sa != sb {
                    return Err(Error::SortMismatch {
                        expected: sa.to_string(),
                        found: sb.to_string(),
                    });
                }
                Ok(())
            }
            Formula::Atom(r, args) => {
                let sorting = self
                    .relations
                    .get(r)
                    .ok_or_else(|| Error::Undeclared(r.to_string()))?;
                self.check_args(r, sorting, args)
            }
            Formula::And(cs) | Formula::Or(cs) => cs.iter().try_for_each(|c| self.check(c)),
            Formula::Not(c) => self.check(c),
            Formula::Implies(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                if !self.sorts.contains(&v.sort) {
                    return Err(Error::IllSorted(format!("undeclared sort {}", v.sort)));
                }
                self.check(body)
            }
        }
    }

    /// Constant and depth-one function terms over `vars`, used by the
    /// formula enumerators.
    pub fn small_terms(&self, vars: &[Var]) -> Vec<Term> {
        let mut base: Vec<Term> = vars.iter().map(Term::var).collect();
        base.extend(self.constants.keys().map(|c| Term::Const(c.clone())));
        let mut out = base.clone();
        for (f, (arity, _)) in &self.functions {
            let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
            for s in arity {
                let pool: Vec<&Term> = base
                    .iter()
                    .filter(|t| self.term_sort(t).ok().as_ref() == Some(s))
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
            out.extend(combos.into_iter().map(|args| Term::App(f.clone(), args)));
        }
        out.sort();
        out
    }
}

/// Declared kind of a theory.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TheoryKind {
    HUniversal,
    HInductive,
    GInductive,
    Unrestricted,
}

impl TheoryKind {
    pub fn label(self) -> &'static str {
        match self {
            TheoryKind::HUniversal => "h-universal",
            TheoryKind::HInductive => "h-inductive",
            TheoryKind::GInductive => "g-inductive",
            TheoryKind::Unrestricted => "unrestricted",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "h-universal" => TheoryKind::HUniversal,
            "h-inductive" => TheoryKind::HInductive,
            "g-inductive" => TheoryKind::GInductive,
            "unrestricted" => TheoryKind::Unrestricted,
            _ => return None,
        })
    }
}

/// A named set of sentences over a signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Theory {
    pub name: String,
    pub signature: Arc<Signature>,
    pub sentences: BTreeSet<Formula>,
    pub kind: TheoryKind,
}

impl Theory {
    /// Builds a theory from canonical sentences. With `kind = None` the most
    /// specific compatible kind is inferred.
    pub fn new(
        name: &str,
        signature: Arc<Signature>,
        sentences: impl IntoIterator<Item = Formula>,
        kind: Option<TheoryKind>,
    ) -> Result<Self> {
        let sentences: BTreeSet<Formula> = sentences.into_iter().collect();
        for s in &sentences {
            signature.check(s)?;
            if !s.is_sentence() {
                return Err(Error::Precondition(format!(
                    "axiom has free variables: {s}"
                )));
            }
        }
        let inferred = super::classify::infer_kind(&sentences);
        let kind = match kind {
            None => inferred,
            Some(k) if k >= inferred => k,
            Some(k) => {
                return Err(Error::Precondition(format!(
                    "theory `{name}` declared {} but contains sentences outside that kind",
                    k.label()
                )))
            }
        };
        Ok(Theory {
            name: name.to_string(),
            signature,
            sentences,
            kind,
        })
    }
}
