//! Name resolution and sort inference from syntax trees to formulas.

use std::collections::BTreeMap;

use super::ast::{FAst, PResult, TAst};
use super::lexer::Pos;
use super::ParseDiagnostic;
use crate::logic::syntax::name_index;
use crate::logic::{canonicalize, Formula, Signature, Sym, Term, Var};

/// Bound variables get indices from here on before canonical renaming.
const BOUND_BASE: u32 = 1 << 20;

/// Default sort of signatures inferred from bare formulas.
pub const INFERRED_SORT: &str = "V";

#[derive(Clone, Debug)]
enum RT {
    Var(usize),
    Const(Sym),
    App(Sym, Vec<RT>),
}

#[derive(Clone, Debug)]
enum RF {
    True,
    False,
    Eq(RT, RT),
    Atom(Sym, Vec<RT>),
    And(Vec<RF>),
    Or(Vec<RF>),
    Not(Box<RF>),
    Implies(Box<RF>, Box<RF>),
    Quant(bool, usize, Box<RF>),
}

struct VarInfo {
    name: String,
    bound: bool,
    sort: Option<Sym>,
    pos: Pos,
}

/// Symbols collected when no signature is supplied.
#[derive(Default)]
struct Inferred {
    relations: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
    constants: std::collections::BTreeSet<String>,
}

struct Elab<'a> {
    sig: Option<&'a Signature>,
    vars: Vec<VarInfo>,
    free: BTreeMap<(String, Option<String>), usize>,
    scope: Vec<(String, usize)>,
    inferred: Inferred,
    eqs: Vec<(usize, RT, Pos)>,
}

fn diag<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    Err(ParseDiagnostic::error(pos, msg.into()))
}

impl<'a> Elab<'a> {
    fn new(sig: Option<&'a Signature>) -> Self {
        Elab {
            sig,
            vars: Vec::new(),
            free: BTreeMap::new(),
            scope: Vec::new(),
            inferred: Inferred::default(),
            eqs: Vec::new(),
        }
    }

    fn sort_named(&self, name: &str, pos: Pos) -> PResult<Sym> {
        match self.sig {
            Some(sig) if sig.sorts().contains(&Sym::new(name)) => Ok(Sym::new(name)),
            Some(_) => diag(pos, format!("undeclared sort `{name}`")),
            None if name == INFERRED_SORT => Ok(Sym::new(name)),
            None => diag(
                pos,
                format!("unknown sort `{name}` (only `{INFERRED_SORT}` without a signature)"),
            ),
        }
    }

    fn constrain(&mut self, id: usize, s: &Sym, pos: Pos) -> PResult<()> {
        match &self.vars[id].sort {
            Some(t) if t != s => diag(
                pos,
                format!(
                    "variable `{}` used at sort {s} but has sort {t}",
                    self.vars[id].name
                ),
            ),
            Some(_) => Ok(()),
            None => {
                self.vars[id].sort = Some(s.clone());
                Ok(())
            }
        }
    }

    fn term(&mut self, t: &TAst, expected: Option<&Sym>) -> PResult<RT> {
        match t {
            TAst::Name { name, ann, pos } => {
                let ann_sort = match ann {
                    Some((s, p)) => Some(self.sort_named(s, *p)?),
                    None => None,
                };
                let vars = &self.vars;
                let hit = self.scope.iter().rev().find(|(n, id)| {
                    n == name
                        && match (&ann_sort, &vars[*id].sort) {
                            (Some(a), Some(s)) => a == s,
                            _ => true,
                        }
                });
                if let Some(&(_, id)) = hit {
                    if let Some(s) = &ann_sort {
                        self.constrain(id, s, *pos)?;
                    }
                    if let Some(s) = expected {
                        self.constrain(id, s, *pos)?;
                    }
                    return Ok(RT::Var(id));
                }
                if ann.is_none() {
                    let sym = Sym::new(name);
                    match self.sig {
                        Some(sig) if sig.constants().contains_key(&sym) => {
                            if let Some(s) = expected {
                                if &sig.constants()[&sym] != s {
                                    return diag(
                                        *pos,
                                        format!("constant `{name}` is not of sort {s}"),
                                    );
                                }
                            }
                            return Ok(RT::Const(sym));
                        }
                        None if name_index(name).is_none() => {
                            self.inferred.constants.insert(name.clone());
                            return Ok(RT::Const(sym));
                        }
                        _ => {}
                    }
                }
                if name_index(name).is_none() {
                    return diag(*pos, format!("undeclared symbol `{name}`"));
                }
                let key = (name.clone(), ann.as_ref().map(|(s, _)| s.clone()));
                let id = match self.free.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = self.vars.len();
                        self.vars.push(VarInfo {
                            name: name.clone(),
                            bound: false,
                            sort: ann_sort.clone(),
                            pos: *pos,
                        });
                        self.free.insert(key, id);
                        id
                    }
                };
                if let Some(s) = expected {
                    self.constrain(id, s, *pos)?;
                }
                Ok(RT::Var(id))
            }
            TAst::App { name, args, pos } => {
                let sym = Sym::new(name);
                match self.sig {
                    Some(sig) => {
                        let Some((arity, result)) = sig.functions().get(&sym).cloned() else {
                            return diag(*pos, format!("undeclared function `{name}`"));
                        };
                        if arity.len() != args.len() {
                            return diag(
                                *pos,
                                format!(
                                    "`{name}` expects {} arguments, got {}",
                                    arity.len(),
                                    args.len()
                                ),
                            );
                        }
                        if let Some(s) = expected {
                            if &result != s {
                                return diag(
                                    *pos,
                                    format!("`{name}` returns {result}, expected {s}"),
                                );
                            }
                        }
                        let rts = args
                            .iter()
                            .zip(&arity)
                            .map(|(a, s)| self.term(a, Some(s)))
                            .collect::<PResult<Vec<_>>>()?;
                        Ok(RT::App(sym, rts))
                    }
                    None => {
                        self.note_arity(true, name, args.len(), *pos)?;
                        let v = Sym::new(INFERRED_SORT);
                        let rts = args
                            .iter()
                            .map(|a| self.term(a, Some(&v)))
                            .collect::<PResult<Vec<_>>>()?;
                        Ok(RT::App(sym, rts))
                    }
                }
            }
        }
    }

    fn note_arity(&mut self, function: bool, name: &str, n: usize, pos: Pos) -> PResult<()> {
        let (mine, other) = if function {
            (&mut self.inferred.functions, &self.inferred.relations)
        } else {
            (&mut self.inferred.relations, &self.inferred.functions)
        };
        if other.contains_key(name) {
            return diag(
                pos,
                format!("`{name}` used both as a relation and a function"),
            );
        }
        match mine.get(name) {
            Some(&m) if m != n => diag(pos, format!("`{name}` used with {m} and {n} arguments")),
            _ => {
                mine.insert(name.to_string(), n);
                Ok(())
            }
        }
    }

    fn term_sort(&self, t: &RT) -> Option<Sym> {
        match t {
            RT::Var(id) => self.vars[*id].sort.clone(),
            RT::Const(c) => match self.sig {
                Some(sig) => sig.constants().get(c).cloned(),
                None => Some(Sym::new(INFERRED_SORT)),
            },
            RT::App(f, _) => match self.sig {
                Some(sig) => sig.functions().get(f).map(|(_, r)| r.clone()),
                None => Some(Sym::new(INFERRED_SORT)),
            },
        }
    }

    fn formula(&mut self, f: &FAst) -> PResult<RF> {
        Ok(match f {
            FAst::True => RF::True,
            FAst::False => RF::False,
            FAst::Eq(a, b, pos) => {
                let (ra, rb) = (self.term(a, None)?, self.term(b, None)?);
                if let RT::Var(id) = ra {
                    self.eqs.push((id, rb.clone(), *pos));
                }
                if let RT::Var(id) = rb {
                    self.eqs.push((id, ra.clone(), *pos));
                }
                RF::Eq(ra, rb)
            }
            FAst::Rel { name, args, pos } => {
                let sym = Sym::new(name);
                let sorting: Vec<Option<Sym>> = match self.sig {
                    Some(sig) => match sig.relation(&sym) {
                        Some(s) => s.iter().cloned().map(Some).collect(),
                        None => {
                            if args.is_empty() && name_index(name).is_some() {
                                return diag(*pos, format!("variable `{name}` used as a formula"));
                            }
                            return diag(*pos, format!("undeclared relation `{name}`"));
                        }
                    },
                    None => {
                        self.note_arity(false, name, args.len(), *pos)?;
                        vec![Some(Sym::new(INFERRED_SORT)); args.len()]
                    }
                };
                if sorting.len() != args.len() {
                    return diag(
                        *pos,
                        format!(
                            "`{name}` expects {} arguments, got {}",
                            sorting.len(),
                            args.len()
                        ),
                    );
                }
                let rts = args
                    .iter()
                    .zip(&sorting)
                    .map(|(a, s)| self.term(a, s.as_ref()))
                    .collect::<PResult<Vec<_>>>()?;
                RF::Atom(sym, rts)
            }
            FAst::And(cs) => RF::And(cs.iter().map(|c| self.formula(c)).collect::<PResult<_>>()?),
            FAst::Or(cs) => RF::Or(cs.iter().map(|c| self.formula(c)).collect::<PResult<_>>()?),
            FAst::Not(c) => RF::Not(Box::new(self.formula(c)?)),
            FAst::Implies(a, b) => {
                RF::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?))
            }
            FAst::Quant {
                exists,
                binders,
                body,
            } => {
                let mut ids = Vec::new();
                for (name, ann, pos) in binders {
                    let sort = match ann {
                        Some((s, p)) => Some(self.sort_named(s, *p)?),
                        None => None,
                    };
                    let id = self.vars.len();
                    self.vars.push(VarInfo {
                        name: name.clone(),
                        bound: true,
                        sort,
                        pos: *pos,
                    });
                    self.scope.push((name.clone(), id));
                    ids.push(id);
                }
                let mut inner = self.formula(body)?;
                for _ in binders {
                    self.scope.pop();
                }
                for id in ids.into_iter().rev() {
                    inner = RF::Quant(*exists, id, Box::new(inner));
                }
                inner
            }
        })
    }

    fn infer_sorts(&mut self) -> PResult<()> {
        loop {
            let mut changed = false;
            for k in 0..self.eqs.len() {
                let (id, other, pos) = self.eqs[k].clone();
                if let Some(s) = self.term_sort(&other) {
                    if self.vars[id].sort.is_none() {
                        changed = true;
                    }
                    self.constrain(id, &s, pos)?;
                }
            }
            if !changed {
                break;
            }
        }
        let default = match self.sig {
            Some(sig) => sig.default_sort().cloned(),
            None => Some(Sym::new(INFERRED_SORT)),
        };
        for v in &mut self.vars {
            if v.sort.is_none() {
                match &default {
                    Some(s) => v.sort = Some(s.clone()),
                    None => return diag(v.pos, format!("cannot infer the sort of `{}`", v.name)),
                }
            }
        }
        Ok(())
    }

    fn var(&self, id: usize) -> Var {
        let info = &self.vars[id];
        let sort = info.sort.clone().expect("sorts inferred");
        let index = if info.bound {
            BOUND_BASE + id as u32
        } else {
            name_index(&info.name).expect("free variables are scheme names")
        };
        Var::new(sort, index)
    }

    fn build_term(&self, t: &RT) -> Term {
        match t {
            RT::Var(id) => Term::Var(self.var(*id)),
            RT::Const(c) => Term::Const(c.clone()),
            RT::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.build_term(a)).collect())
            }
        }
    }

    fn build(&self, f: &RF) -> Formula {
        match f {
            RF::True => Formula::True,
            RF::False => Formula::False,
            RF::Eq(a, b) => Formula::Eq(self.build_term(a), self.build_term(b)),
            RF::Atom(r, args) => {
                Formula::Atom(r.clone(), args.iter().map(|a| self.build_term(a)).collect())
            }
            RF::And(cs) => Formula::and(cs.iter().map(|c| self.build(c))),
            RF::Or(cs) => Formula::or(cs.iter().map(|c| self.build(c))),
            RF::Not(c) => Formula::not(self.build(c)),
            RF::Implies(a, b) => Formula::implies(self.build(a), self.build(b)),
            RF::Quant(exists, id, body) => {
                let v = self.var(*id);
                let body = self.build(body);
                if *exists {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
        }
    }

    fn inferred_signature(&self) -> Signature {
        let mut sig = Signature::new("");
        let v = INFERRED_SORT;
        sig.add_sort(v).expect("fresh");
        for (r, &n) in &self.inferred.relations {
            let _ = sig.add_relation(r, &vec![v; n]);
        }
        for (f, &n) in &self.inferred.functions {
            let _ = sig.add_function(f, &vec![v; n], v);
        }
        for c in &self.inferred.constants {
            let _ = sig.add_constant(c, v);
        }
        sig
    }
}

/// Elaborates and canonicalizes a formula against `sig`.
pub(crate) fn elaborate(sig: &Signature, ast: &FAst, pos: Pos) -> PResult<Formula> {
    let mut e = Elab::new(Some(sig));
    let rf = e.formula(ast)?;
    e.infer_sorts()?;
    let f = e.build(&rf);
    if let Err(err) = sig.check(&f) {
        return diag(pos, err.to_string());
    }
    Ok(canonicalize(&f))
}

/// Elaborates a formula with no declared signature: one sort `V`, with
/// relations, functions and constants read off their uses.
pub(crate) fn elaborate_inferring(ast: &FAst, pos: Pos) -> PResult<(Signature, Formula)> {
    let mut e = Elab::new(None);
    let rf = e.formula(ast)?;
    e.infer_sorts()?;
    let f = e.build(&rf);
    let sig = e.inferred_signature();
    if let Err(err) = sig.check(&f) {
        return diag(pos, err.to_string());
    }
    Ok((sig, canonicalize(&f)))
}
