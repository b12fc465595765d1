//! Plain-text format for signatures, theories, structures, classes,
//! fragments and formulas.
//!
//! Files start with a header line `#poslog v1 <kind>`. `#` begins a comment.

mod ast;
mod elab;
mod lexer;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ast::{Decl, Entry, FAst, Item, Name, Parser, SetElem, Value};
pub use lexer::{lex, Pos, Tok, Token};
pub use print::{
    print_class, print_formula, print_fragment, print_signature, print_structure, print_term,
    print_theory,
};

use crate::error::{Error, Result};
use crate::logic::{Formula, Signature, Sym, Theory, TheoryKind};
use crate::semantics::{FiniteStructure, UniverseClass};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message produced while reading a document.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub hint: Option<String>,
}

impl ParseDiagnostic {
    pub fn error(pos: Pos, message: String) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            line: pos.line,
            column: pos.column,
            message,
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: &str) -> Self {
        self.hint = Some(hint.to_string());
        self
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DocKind {
    Signature,
    Theory,
    Structure,
    Class,
    Formula,
    Fragment,
}

impl DocKind {
    pub fn label(self) -> &'static str {
        match self {
            DocKind::Signature => "signature",
            DocKind::Theory => "theory",
            DocKind::Structure => "structure",
            DocKind::Class => "class",
            DocKind::Formula => "formula",
            DocKind::Fragment => "fragment",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "signature" => DocKind::Signature,
            "theory" => DocKind::Theory,
            "structure" => DocKind::Structure,
            "class" => DocKind::Class,
            "formula" => DocKind::Formula,
            "fragment" => DocKind::Fragment,
            _ => return None,
        })
    }
}

/// Source text with its declared kind.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SourceDocument {
    pub path: Option<PathBuf>,
    pub text: String,
    pub kind: DocKind,
}

const HEADER: &str = "#poslog v1 ";

impl SourceDocument {
    /// Reads the kind from the header line.
    pub fn from_text(text: &str) -> Result<Self> {
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        let line = text
            .lines()
            .position(|l| !l.trim().is_empty())
            .map_or(1, |i| i + 1);
        let here = Pos { line, column: 1 };
        let Some(rest) = first.trim().strip_prefix(HEADER) else {
            return Err(Error::Parse(vec![ParseDiagnostic::error(
                here,
                "missing header line".into(),
            )
            .with_hint("start the file with `#poslog v1 <kind>`")]));
        };
        let kind = DocKind::from_label(rest.trim()).ok_or_else(|| {
            Error::Parse(vec![ParseDiagnostic::error(
                here,
                format!("unknown document kind `{}`", rest.trim()),
            )])
        })?;
        Ok(SourceDocument {
            path: None,
            text: text.to_string(),
            kind,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Parse(vec![ParseDiagnostic::error(
                Pos { line: 1, column: 1 },
                format!("cannot read {}: {e}", path.display()),
            )])
        })?;
        let mut d = Self::from_text(&text)?;
        d.path = Some(path.to_path_buf());
        Ok(d)
    }
}

/// Seed formulas of a named fragment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FragmentDecl {
    pub name: String,
    pub signature: Arc<Signature>,
    pub formulas: Vec<Formula>,
}

/// Everything declared in one document, in source order.
#[derive(Clone, Debug)]
pub struct Document {
    pub kind: DocKind,
    pub signatures: Vec<Arc<Signature>>,
    pub theories: Vec<Arc<Theory>>,
    pub structures: Vec<FiniteStructure>,
    pub classes: Vec<UniverseClass>,
    pub fragments: Vec<FragmentDecl>,
    pub formulas: Vec<(Arc<Signature>, Formula)>,
}

impl Document {
    pub fn theory(&self, name: &str) -> Option<&Arc<Theory>> {
        self.theories.iter().find(|t| t.name == name)
    }

    pub fn structure(&self, name: &str) -> Option<&FiniteStructure> {
        self.structures.iter().find(|s| s.name == name)
    }

    pub fn class(&self, name: &str) -> Option<&UniverseClass> {
        self.classes.iter().find(|c| c.name == name)
    }
}

/// Principal value of a document.
#[derive(Clone, Debug)]
pub enum Parsed {
    Signature(Arc<Signature>),
    Theory(Arc<Theory>),
    Structure(FiniteStructure),
    Class(UniverseClass),
    Formula(Arc<Signature>, Formula),
    Fragment(FragmentDecl),
}

impl PartialEq for Parsed {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Parsed::Signature(a), Parsed::Signature(b)) => a == b,
            (Parsed::Theory(a), Parsed::Theory(b)) => a == b,
            (Parsed::Structure(a), Parsed::Structure(b)) => a == b,
            (Parsed::Class(a), Parsed::Class(b)) => a == b,
            (Parsed::Formula(s, a), Parsed::Formula(t, b)) => s == t && a == b,
            (Parsed::Fragment(a), Parsed::Fragment(b)) => a == b,
            _ => false,
        }
    }
}

/// Parses a document and returns its last value of the declared kind.
pub fn parse(doc: &SourceDocument) -> Result<Parsed> {
    let d = parse_document(doc)?;
    let missing = || {
        Error::Parse(vec![ParseDiagnostic::error(
            Pos { line: 1, column: 1 },
            format!("document declares no {}", doc.kind.label()),
        )])
    };
    Ok(match doc.kind {
        DocKind::Signature => Parsed::Signature(d.signatures.last().cloned().ok_or_else(missing)?),
        DocKind::Theory => Parsed::Theory(d.theories.last().cloned().ok_or_else(missing)?),
        DocKind::Structure => Parsed::Structure(d.structures.last().cloned().ok_or_else(missing)?),
        DocKind::Class => Parsed::Class(d.classes.last().cloned().ok_or_else(missing)?),
        DocKind::Fragment => Parsed::Fragment(d.fragments.last().cloned().ok_or_else(missing)?),
        DocKind::Formula => {
            let (s, f) = d.formulas.last().cloned().ok_or_else(missing)?;
            Parsed::Formula(s, f)
        }
    })
}

/// Parses every item of a document.
pub fn parse_document(doc: &SourceDocument) -> Result<Document> {
    let toks = lex(&doc.text).map_err(Error::Parse)?;
    let items = Parser::new(toks)
        .document(doc.kind == DocKind::Formula)
        .map_err(|d| Error::Parse(vec![d]))?;
    let mut b = Builder::new(doc.kind);
    for item in items {
        b.item(item).map_err(|d| Error::Parse(vec![d]))?;
    }
    Ok(b.finish())
}

/// Parses `text` as a single formula over `sig`.
pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula> {
    let (ast, pos) = formula_ast(text)?;
    elab::elaborate(sig, &ast, pos).map_err(|d| Error::Parse(vec![d]))
}

/// Parses a formula with no declared signature; the signature is read off
/// the formula, over a single sort `V`.
pub fn parse_formula_inferring(text: &str) -> Result<(Signature, Formula)> {
    let (ast, pos) = formula_ast(text)?;
    elab::elaborate_inferring(&ast, pos).map_err(|d| Error::Parse(vec![d]))
}

fn formula_ast(text: &str) -> Result<(FAst, Pos)> {
    let toks = lex(text).map_err(Error::Parse)?;
    let mut p = Parser::new(toks);
    let items = p.document(true).map_err(|d| Error::Parse(vec![d]))?;
    match items.as_slice() {
        [Item::Formula(f, pos)] => Ok((f.clone(), *pos)),
        _ => Err(Error::Parse(vec![ParseDiagnostic::error(
            Pos { line: 1, column: 1 },
            "expected exactly one formula".into(),
        )])),
    }
}

fn header(kind: DocKind) -> String {
    format!("{HEADER}{}\n", kind.label())
}

/// Self-contained text for a value; reparses to an equal value.
pub fn serialize(v: &Parsed) -> String {
    match v {
        Parsed::Signature(s) => format!("{}{}", header(DocKind::Signature), print_signature(s)),
        Parsed::Theory(t) => format!(
            "{}{}{}",
            header(DocKind::Theory),
            print_signature(&t.signature),
            print_theory(t)
        ),
        Parsed::Structure(m) => format!(
            "{}{}{}",
            header(DocKind::Structure),
            print_signature(&m.signature),
            print_structure(m)
        ),
        Parsed::Class(c) => {
            let mut out = header(DocKind::Class);
            out.push_str(&print_signature(&c.signature));
            for m in &c.members {
                out.push_str(&print_structure(m));
            }
            out.push_str(&print_class(c));
            out
        }
        Parsed::Formula(s, f) => format!(
            "{}{}{};\n",
            header(DocKind::Formula),
            print_signature(s),
            print_formula(s, f)
        ),
        Parsed::Fragment(fr) => format!(
            "{}{}{}",
            header(DocKind::Fragment),
            print_signature(&fr.signature),
            print_fragment(&fr.name, &fr.signature, &fr.formulas)
        ),
    }
}

type PResult<T> = std::result::Result<T, ParseDiagnostic>;

fn diag<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    Err(ParseDiagnostic::error(pos, msg.into()))
}

struct Builder {
    kind: DocKind,
    anon: Signature,
    anon_used: bool,
    named: Vec<Arc<Signature>>,
    theories: Vec<Arc<Theory>>,
    structures: Vec<FiniteStructure>,
    classes: Vec<UniverseClass>,
    fragments: Vec<FragmentDecl>,
    formulas: Vec<(Arc<Signature>, Formula)>,
}

impl Builder {
    fn new(kind: DocKind) -> Self {
        Builder {
            kind,
            anon: Signature::new(""),
            anon_used: false,
            named: Vec::new(),
            theories: Vec::new(),
            structures: Vec::new(),
            classes: Vec::new(),
            fragments: Vec::new(),
            formulas: Vec::new(),
        }
    }

    fn finish(self) -> Document {
        let mut signatures = self.named;
        let anon_nonempty = !self.anon.sorts().is_empty() || !self.anon.relations().is_empty();
        if anon_nonempty || (signatures.is_empty() && self.anon_used) {
            signatures.push(Arc::new(self.anon));
        }
        Document {
            kind: self.kind,
            signatures,
            theories: self.theories,
            structures: self.structures,
            classes: self.classes,
            fragments: self.fragments,
            formulas: self.formulas,
        }
    }

    fn decl(sig: &mut Signature, d: Decl) -> PResult<()> {
        let wrap = |pos: Pos, r: Result<()>| r.or_else(|e| diag(pos, e.to_string()));
        match d {
            Decl::Sort(names) => {
                for (n, p) in names {
                    wrap(p, sig.add_sort(&n))?;
                }
                Ok(())
            }
            Decl::Rel {
                name: (n, p),
                sorts,
            } => {
                for (s, sp) in &sorts {
                    if !sig.sorts().contains(&Sym::new(s)) {
                        return diag(*sp, format!("undeclared sort `{s}`"));
                    }
                }
                if n.chars()
                    .next()
                    .is_some_and(|c| !c.is_alphanumeric() && c != '_')
                    && sorts.len() != 2
                {
                    return diag(p, format!("symbolic relation `{n}` must be binary"));
                }
                let ss: Vec<&str> = sorts.iter().map(|(s, _)| s.as_str()).collect();
                wrap(p, sig.add_relation(&n, &ss))
            }
            Decl::Fun {
                name: (n, p),
                args,
                result,
            } => {
                for (s, sp) in args.iter().chain([&result]) {
                    if !sig.sorts().contains(&Sym::new(s)) {
                        return diag(*sp, format!("undeclared sort `{s}`"));
                    }
                }
                let ss: Vec<&str> = args.iter().map(|(s, _)| s.as_str()).collect();
                wrap(p, sig.add_function(&n, &ss, &result.0))
            }
            Decl::Const {
                name: (n, p),
                sort: (s, sp),
            } => {
                if !sig.sorts().contains(&Sym::new(&s)) {
                    return diag(sp, format!("undeclared sort `{s}`"));
                }
                wrap(p, sig.add_constant(&n, &s))
            }
        }
    }

    fn resolve(&mut self, over: &Option<Name>) -> PResult<Arc<Signature>> {
        match over {
            Some((n, p)) => self
                .named
                .iter()
                .rev()
                .find(|s| &s.name == n)
                .cloned()
                .ok_or_else(|| ParseDiagnostic::error(*p, format!("unknown signature `{n}`"))),
            None => {
                let anon_empty = self.anon.sorts().is_empty() && self.anon.relations().is_empty();
                if anon_empty && self.named.len() == 1 {
                    return Ok(self.named[0].clone());
                }
                self.anon_used = true;
                Ok(Arc::new(self.anon.clone()))
            }
        }
    }

    fn item(&mut self, item: Item) -> PResult<()> {
        match item {
            Item::Decl(d) => Self::decl(&mut self.anon, d),
            Item::Signature {
                name: (n, p),
                decls,
            } => {
                if self.named.iter().any(|s| s.name == n) {
                    return diag(p, format!("signature `{n}` declared twice"));
                }
                let mut sig = Signature::new(&n);
                for d in decls {
                    Self::decl(&mut sig, d)?;
                }
                self.named.push(Arc::new(sig));
                Ok(())
            }
            Item::Theory {
                name: (n, p),
                kind,
                over,
                axioms,
            } => {
                let sig = self.resolve(&over)?;
                let kind = match kind {
                    None => None,
                    Some((k, kp)) => Some(TheoryKind::from_label(&k).ok_or_else(|| {
                        ParseDiagnostic::error(kp, format!("unknown theory kind `{k}`"))
                    })?),
                };
                let mut sentences = BTreeSet::new();
                for (ast, ap) in &axioms {
                    let f = elab::elaborate(&sig, ast, *ap)?;
                    if !f.is_sentence() {
                        let names: Vec<String> = f.free_vars().iter().map(|v| v.name()).collect();
                        return diag(
                            *ap,
                            format!("axiom has free variables: {}", names.join(", ")),
                        )
                        .map_err(|d| d.with_hint("bind them with `forall`"));
                    }
                    if let Some(k) = kind {
                        let single: BTreeSet<Formula> = [f.clone()].into_iter().collect();
                        if crate::logic::classify::infer_kind(&single) > k {
                            return diag(*ap, format!("axiom is not {}", k.label()));
                        }
                    }
                    sentences.insert(f);
                }
                if self.theories.iter().any(|t| t.name == n) {
                    return diag(p, format!("theory `{n}` declared twice"));
                }
                let t =
                    Theory::new(&n, sig, sentences, kind).or_else(|e| diag(p, e.to_string()))?;
                self.theories.push(Arc::new(t));
                Ok(())
            }
            Item::Structure {
                name: (n, p),
                over,
                entries,
            } => {
                let sig = self.resolve(&over)?;
                if self.structures.iter().any(|s| s.name == n) {
                    return diag(p, format!("structure `{n}` declared twice"));
                }
                let m = build_structure(&n, p, sig, entries)?;
                self.structures.push(m);
                Ok(())
            }
            Item::Class {
                name: (n, p),
                over,
                members,
            } => {
                let sig = self.resolve(&over)?;
                let mut ms = Vec::new();
                for (m, mp) in members {
                    let s = self
                        .structures
                        .iter()
                        .find(|s| s.name == m)
                        .ok_or_else(|| {
                            ParseDiagnostic::error(mp, format!("unknown structure `{m}`"))
                        })?;
                    ms.push(s.clone());
                }
                let c =
                    UniverseClass::new(&n, sig, ms, None).or_else(|e| diag(p, e.to_string()))?;
                self.classes.push(c);
                Ok(())
            }
            Item::Fragment {
                name: (n, _),
                over,
                formulas,
            } => {
                let sig = self.resolve(&over)?;
                let fs = formulas
                    .iter()
                    .map(|(ast, fp)| elab::elaborate(&sig, ast, *fp))
                    .collect::<PResult<Vec<_>>>()?;
                self.fragments.push(FragmentDecl {
                    name: n,
                    signature: sig,
                    formulas: fs,
                });
                Ok(())
            }
            Item::Formula(ast, p) => {
                let sig = self.resolve(&None)?;
                let f = elab::elaborate(&sig, &ast, p)?;
                self.formulas.push((sig, f));
                Ok(())
            }
        }
    }
}

fn build_structure(
    name: &str,
    pos: Pos,
    sig: Arc<Signature>,
    entries: Vec<Entry>,
) -> PResult<FiniteStructure> {
    let mut carriers: BTreeMap<Sym, Vec<String>> = BTreeMap::new();
    let mut rels: BTreeMap<Sym, BTreeSet<Vec<usize>>> = BTreeMap::new();
    let mut funs: BTreeMap<Sym, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    let mut consts: BTreeMap<Sym, usize> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let elem = |carriers: &BTreeMap<Sym, Vec<String>>, s: &Sym, (e, p): &Name| -> PResult<usize> {
        let c = carriers.get(s).ok_or_else(|| {
            ParseDiagnostic::error(*p, format!("carrier of sort `{s}` not given yet"))
        })?;
        c.iter().position(|x| x == e).ok_or_else(|| {
            ParseDiagnostic::error(*p, format!("`{e}` is not an element of sort `{s}`"))
        })
    };
    for Entry {
        name: (n, p),
        value,
    } in entries
    {
        if !seen.insert(n.clone()) {
            return diag(p, format!("`{n}` interpreted twice"));
        }
        let sym = Sym::new(&n);
        if sig.sorts().contains(&sym) {
            let Value::Set(elems) = value else {
                return diag(p, format!("carrier of `{n}` must be a set"));
            };
            let mut names = Vec::new();
            for e in elems {
                match e {
                    SetElem::Atom((x, xp)) => {
                        if names.contains(&x) {
                            return diag(xp, format!("element `{x}` listed twice"));
                        }
                        names.push(x)
                    }
                    SetElem::Tuple(_, tp) | SetElem::Map(_, _, tp) => {
                        return diag(tp, "carrier elements must be names")
                    }
                }
            }
            if names.is_empty() {
                return diag(p, format!("carrier of `{n}` is empty"));
            }
            carriers.insert(sym, names);
        } else if let Some(sorting) = sig.relation(&sym) {
            let Value::Set(elems) = value else {
                return diag(p, format!("relation `{n}` must be a set of tuples"));
            };
            let mut tuples = BTreeSet::new();
            for e in elems {
                let (parts, tp) = match e {
                    SetElem::Atom(a) => {
                        let tp = a.1;
                        (vec![a], tp)
                    }
                    SetElem::Tuple(parts, tp) => (parts, tp),
                    SetElem::Map(_, _, tp) => return diag(tp, "relation entries are tuples"),
                };
                if parts.len() != sorting.len() {
                    return diag(tp, format!("`{n}` has arity {}", sorting.len()));
                }
                let t = sorting
                    .iter()
                    .zip(&parts)
                    .map(|(s, e)| elem(&carriers, s, e))
                    .collect::<PResult<Vec<_>>>()?;
                tuples.insert(t);
            }
            rels.insert(sym, tuples);
        } else if let Some((arity, res)) = sig.functions().get(&sym).cloned() {
            let Value::Set(elems) = value else {
                return diag(p, format!("function `{n}` must be a table"));
            };
            let mut table = BTreeMap::new();
            for e in elems {
                let SetElem::Map(args, v, tp) = e else {
                    return diag(
                        p,
                        format!("function `{n}` entries have the form (args) -> value"),
                    );
                };
                if args.len() != arity.len() {
                    return diag(tp, format!("`{n}` has arity {}", arity.len()));
                }
                let key = arity
                    .iter()
                    .zip(&args)
                    .map(|(s, e)| elem(&carriers, s, e))
                    .collect::<PResult<Vec<_>>>()?;
                let val = elem(&carriers, &res, &v)?;
                if table.insert(key, val).is_some() {
                    return diag(tp, format!("`{n}` defined twice at the same arguments"));
                }
            }
            funs.insert(sym, table);
        } else if let Some(s) = sig.constants().get(&sym).cloned() {
            let Value::Elem(e) = value else {
                return diag(p, format!("constant `{n}` takes a single element"));
            };
            consts.insert(sym, elem(&carriers, &s, &e)?);
        } else {
            return diag(p, format!("undeclared symbol `{n}`"));
        }
    }
    FiniteStructure::build(name, sig, carriers, rels, funs, consts)
        .or_else(|e| diag(pos, e.to_string()))
}

#[cfg(test)]
mod tests;
