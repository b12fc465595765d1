use std::collections::BTreeMap;

use super::structure::FiniteStructure;
use crate::error::{Error, Result};
use crate::logic::{Formula, Sym, Term, Var};

/// Variable assignment.
pub type Assignment = BTreeMap<Var, usize>;

/// Tarskian satisfaction `M |= f[a]`.
pub fn eval(m: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<bool> {
    for v in f.free_vars() {
        match a.get(&v) {
            None => {
                return Err(Error::Precondition(format!(
                    "assignment does not cover free variable {v}"
                )))
            }
            Some(&e) if e >= m.size(&v.sort) => {
                return Err(Error::IllSorted(format!(
                    "value {e} for {v} outside the carrier of sort {}",
                    v.sort
                )))
            }
            Some(_) => {}
        }
    }
    let mut env: Vec<(Var, usize)> = a.iter().map(|(v, &e)| (v.clone(), e)).collect();
    Ok(holds(m, f, &mut env))
}

/// Satisfaction at a tuple assigned positionally to `vars`; the caller
/// guarantees coverage and sorts.
pub fn eval_at(m: &FiniteStructure, f: &Formula, vars: &[Var], tuple: &[usize]) -> bool {
    let mut env: Vec<(Var, usize)> = vars.iter().cloned().zip(tuple.iter().copied()).collect();
    holds(m, f, &mut env)
}

/// Sentence truth.
pub fn satisfies(m: &FiniteStructure, f: &Formula) -> bool {
    holds(m, f, &mut Vec::new())
}

fn lookup(env: &[(Var, usize)], v: &Var) -> usize {
    env.iter()
        .rev()
        .find(|(w, _)| w == v)
        .map(|(_, e)| *e)
        .unwrap_or_else(|| panic!("unassigned variable {v}"))
}

pub(crate) fn term_value(m: &FiniteStructure, t: &Term, env: &[(Var, usize)]) -> usize {
    match t {
        Term::Var(v) => lookup(env, v),
        Term::Const(c) => m.constant(c),
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term_value(m, a, env)).collect();
            m.apply(f, &vals)
        }
    }
}

fn quantify(
    m: &FiniteStructure,
    v: &Var,
    body: &Formula,
    env: &mut Vec<(Var, usize)>,
    universal: bool,
) -> bool {
    let n = m.size(&v.sort);
    for e in 0..n {
        env.push((v.clone(), e));
        let r = holds(m, body, env);
        env.pop();
        if r != universal {
            return !universal;
        }
    }
    universal
}

pub(crate) fn holds(m: &FiniteStructure, f: &Formula, env: &mut Vec<(Var, usize)>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => term_value(m, a, env) == term_value(m, b, env),
        Formula::Atom(r, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term_value(m, a, env)).collect();
            m.holds(r, &vals)
        }
        Formula::And(cs) => cs.iter().all(|c| holds(m, c, env)),
        Formula::Or(cs) => cs.iter().any(|c| holds(m, c, env)),
        Formula::Not(c) => !holds(m, c, env),
        Formula::Implies(a, b) => !holds(m, a, env) || holds(m, b, env),
        Formula::Exists(v, body) => quantify(m, v, body, env, false),
        Formula::Forall(v, body) => quantify(m, v, body, env, true),
    }
}

/// Sorting of a variable tuple.
pub fn sorting(vars: &[Var]) -> Vec<Sym> {
    vars.iter().map(|v| v.sort.clone()).collect()
}

/// Tuples of `m` (over the sorting of `vars`) satisfying `f`.
pub fn extension(m: &FiniteStructure, f: &Formula, vars: &[Var]) -> Vec<Vec<usize>> {
    m.tuples(&sorting(vars))
        .into_iter()
        .filter(|t| eval_at(m, f, vars, t))
        .collect()
}
