//! Deterministic serialization in the concrete syntax.

use std::fmt::Write;

use crate::logic::{Formula, Signature, Sym, Term, Theory, Var};
use crate::semantics::{FiniteStructure, UniverseClass};

const OP_CHARS: &str = "<>=~+*/^%-";

fn is_symbolic(name: &str) -> bool {
    name.chars().next().is_some_and(|c| OP_CHARS.contains(c))
}

struct Printer {
    annotate: bool,
}

impl Printer {
    fn var(&self, v: &Var) -> String {
        if self.annotate {
            format!("{}:{}", v.name(), v.sort)
        } else {
            v.name()
        }
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Var(v) => self.var(v),
            Term::Const(c) => c.to_string(),
            Term::App(f, args) => {
                let args: Vec<String> = args.iter().map(|a| self.term(a)).collect();
                format!("{f}({})", args.join(", "))
            }
        }
    }

    fn list(&self, head: &str, cs: &std::collections::BTreeSet<Formula>) -> String {
        let items: Vec<String> = cs.iter().map(|c| self.formula(c)).collect();
        format!("{head}[{}]", items.join(", "))
    }

    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Eq(a, b) => format!("{}={}", self.term(a), self.term(b)),
            Formula::Atom(r, args) if is_symbolic(r.as_str()) && args.len() == 2 => {
                format!("{}{r}{}", self.term(&args[0]), self.term(&args[1]))
            }
            Formula::Atom(r, args) if args.is_empty() => r.to_string(),
            Formula::Atom(r, args) => {
                let args: Vec<String> = args.iter().map(|a| self.term(a)).collect();
                format!("{r}({})", args.join(", "))
            }
            Formula::And(cs) => self.list("And", cs),
            Formula::Or(cs) => self.list("Or", cs),
            Formula::Not(c) => match **c {
                Formula::Implies(..) | Formula::Exists(..) | Formula::Forall(..) => {
                    format!("!({})", self.formula(c))
                }
                _ => format!("!{}", self.formula(c)),
            },
            Formula::Implies(a, b) => {
                let lhs = match **a {
                    Formula::Implies(..) | Formula::Exists(..) | Formula::Forall(..) => {
                        format!("({})", self.formula(a))
                    }
                    _ => self.formula(a),
                };
                format!("{lhs} -> {}", self.formula(b))
            }
            Formula::Exists(..) | Formula::Forall(..) => {
                let exists = matches!(f, Formula::Exists(..));
                let mut vars = Vec::new();
                let mut body = f;
                loop {
                    match body {
                        Formula::Exists(v, b) if exists => {
                            vars.push(self.var(v));
                            body = b;
                        }
                        Formula::Forall(v, b) if !exists => {
                            vars.push(self.var(v));
                            body = b;
                        }
                        _ => break,
                    }
                }
                let q = if exists { "exists" } else { "forall" };
                format!("{q} {}: {}", vars.join(", "), self.formula(body))
            }
        }
    }
}

fn printer(sig: &Signature) -> Printer {
    Printer {
        annotate: !sig.is_single_sorted(),
    }
}

/// One-line rendering; variables carry `:Sort` annotations in multi-sorted
/// signatures.
pub fn print_formula(sig: &Signature, f: &Formula) -> String {
    printer(sig).formula(f)
}

pub fn print_term(sig: &Signature, t: &Term) -> String {
    printer(sig).term(t)
}

fn sort_list(sorts: &[Sym]) -> String {
    let s: Vec<String> = sorts.iter().map(|s| s.to_string()).collect();
    format!("({})", s.join(", "))
}

fn decls(sig: &Signature, indent: &str, out: &mut String) {
    for s in sig.sorts() {
        let _ = writeln!(out, "{indent}sort {s};");
    }
    for (r, sorting) in sig.relations() {
        if sorting.is_empty() {
            let _ = writeln!(out, "{indent}rel {r};");
        } else {
            let _ = writeln!(out, "{indent}rel {r}{};", sort_list(sorting));
        }
    }
    for (f, (arity, res)) in sig.functions() {
        let _ = writeln!(out, "{indent}fun {f}{}:{res};", sort_list(arity));
    }
    for (c, s) in sig.constants() {
        let _ = writeln!(out, "{indent}const {c}:{s};");
    }
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    if sig.name.is_empty() {
        decls(sig, "", &mut out);
    } else {
        let _ = writeln!(out, "signature {} {{", sig.name);
        decls(sig, "  ", &mut out);
        out.push_str("}\n");
    }
    out
}

fn over(sig: &Signature) -> String {
    if sig.name.is_empty() {
        String::new()
    } else {
        format!(" over {}", sig.name)
    }
}

/// Theory block, without its signature.
pub fn print_theory(t: &Theory) -> String {
    let mut out = format!(
        "theory {} : {}{} {{\n",
        t.name,
        t.kind.label(),
        over(&t.signature)
    );
    for s in &t.sentences {
        let _ = writeln!(out, "  axiom {};", print_formula(&t.signature, s));
    }
    out.push_str("}\n");
    out
}

/// Structure block, without its signature.
pub fn print_structure(m: &FiniteStructure) -> String {
    let sig = &m.signature;
    let mut out = format!("structure {}{} {{\n", m.name, over(sig));
    for (s, c) in m.carriers() {
        let _ = writeln!(out, "  {s} = {{{}}};", c.join(", "));
    }
    for (r, sorting) in sig.relations() {
        let tuples: Vec<String> = m
            .relation(r)
            .map(|t| t.tuples().iter().cloned().collect::<Vec<_>>())
            .unwrap_or_default()
            .iter()
            .map(|t| {
                let names: Vec<&str> = sorting
                    .iter()
                    .zip(t)
                    .map(|(s, &e)| m.element_name(s, e))
                    .collect();
                format!("({})", names.join(", "))
            })
            .collect();
        let _ = writeln!(out, "  {r} = {{{}}};", tuples.join(", "));
    }
    for (f, (arity, res)) in sig.functions() {
        let rows: Vec<String> = m
            .function_table(f)
            .into_iter()
            .map(|(args, v)| {
                let names: Vec<&str> = arity
                    .iter()
                    .zip(&args)
                    .map(|(s, &e)| m.element_name(s, e))
                    .collect();
                format!("({}) -> {}", names.join(", "), m.element_name(res, v))
            })
            .collect();
        let _ = writeln!(out, "  {f} = {{{}}};", rows.join(", "));
    }
    for (c, s) in sig.constants() {
        let _ = writeln!(out, "  {c} = {};", m.element_name(s, m.constant(c)));
    }
    out.push_str("}\n");
    out
}

/// Class block, without signature or member structures.
pub fn print_class(c: &UniverseClass) -> String {
    let names: Vec<&str> = c.members.iter().map(|m| m.name.as_str()).collect();
    format!(
        "class {}{} {{ {} }}\n",
        c.name,
        over(&c.signature),
        names.join(", ")
    )
}

pub fn print_fragment(name: &str, sig: &Signature, formulas: &[Formula]) -> String {
    let mut out = format!("fragment {}{} {{\n", name, over(sig));
    for f in formulas {
        let _ = writeln!(out, "  {};", print_formula(sig, f));
    }
    out.push_str("}\n");
    out
}

/// Unannotated rendering, for messages.
impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&Printer { annotate: false }.formula(self))
    }
}
