//! Untyped syntax trees and the recursive-descent parser producing them.

use super::lexer::{Pos, Tok, Token};
use super::ParseDiagnostic;

pub(crate) type PResult<T> = Result<T, ParseDiagnostic>;

pub(crate) type Name = (String, Pos);

#[derive(Clone, Debug)]
pub(crate) enum TAst {
    Name {
        name: String,
        ann: Option<Name>,
        pos: Pos,
    },
    App {
        name: String,
        args: Vec<TAst>,
        pos: Pos,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum FAst {
    True,
    False,
    Eq(TAst, TAst, Pos),
    Rel {
        name: String,
        args: Vec<TAst>,
        pos: Pos,
    },
    And(Vec<FAst>),
    Or(Vec<FAst>),
    Not(Box<FAst>),
    Implies(Box<FAst>, Box<FAst>),
    Quant {
        exists: bool,
        binders: Vec<(String, Option<Name>, Pos)>,
        body: Box<FAst>,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum Decl {
    Sort(Vec<Name>),
    Rel {
        name: Name,
        sorts: Vec<Name>,
    },
    Fun {
        name: Name,
        args: Vec<Name>,
        result: Name,
    },
    Const {
        name: Name,
        sort: Name,
    },
}

#[derive(Clone, Debug)]
pub(crate) enum SetElem {
    Atom(Name),
    Tuple(Vec<Name>, Pos),
    Map(Vec<Name>, Name, Pos),
}

#[derive(Clone, Debug)]
pub(crate) enum Value {
    Set(Vec<SetElem>),
    Elem(Name),
}

#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub name: Name,
    pub value: Value,
}

#[derive(Clone, Debug)]
pub(crate) enum Item {
    Decl(Decl),
    Signature {
        name: Name,
        decls: Vec<Decl>,
    },
    Theory {
        name: Name,
        kind: Option<Name>,
        over: Option<Name>,
        axioms: Vec<(FAst, Pos)>,
    },
    Structure {
        name: Name,
        over: Option<Name>,
        entries: Vec<Entry>,
    },
    Class {
        name: Name,
        over: Option<Name>,
        members: Vec<Name>,
    },
    Fragment {
        name: Name,
        over: Option<Name>,
        formulas: Vec<(FAst, Pos)>,
    },
    Formula(FAst, Pos),
}

const KEYWORDS: [&str; 12] = [
    "sort",
    "rel",
    "fun",
    "const",
    "theory",
    "axiom",
    "structure",
    "over",
    "class",
    "fragment",
    "signature",
    "formula",
];

const FORMULA_WORDS: [&str; 6] = ["true", "false", "forall", "exists", "And", "Or"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, i: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseDiagnostic::error(self.pos(), msg.into()))
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        self.err(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Pos> {
        if *self.peek() == t {
            Ok(self.bump().pos)
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    /// A non-keyword identifier.
    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let p = self.bump().pos;
                Ok((s, p))
            }
            _ => self.unexpected(what),
        }
    }

    /// Identifier or operator symbol naming a relation.
    fn symbol(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Op(s) => {
                let p = self.bump().pos;
                Ok((s, p))
            }
            _ => self.ident(what),
        }
    }

    pub fn document(&mut self, formula_doc: bool) -> PResult<Vec<Item>> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            items.push(self.item(formula_doc)?);
        }
        Ok(items)
    }

    fn item(&mut self, formula_doc: bool) -> PResult<Item> {
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ if formula_doc => String::new(),
            _ => return self.unexpected("a declaration"),
        };
        match word.as_str() {
            "sort" | "rel" | "fun" | "const" => Ok(Item::Decl(self.decl()?)),
            "signature" => {
                self.bump();
                let name = self.ident("a signature name")?;
                self.expect(Tok::LBrace)?;
                let mut decls = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    decls.push(self.decl()?);
                }
                Ok(Item::Signature { name, decls })
            }
            "theory" => self.theory(),
            "structure" => self.structure(),
            "class" => {
                self.bump();
                let name = self.ident("a class name")?;
                let over = self.over()?;
                self.expect(Tok::LBrace)?;
                let mut members = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        members.push(self.ident("a structure name")?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(Item::Class {
                    name,
                    over,
                    members,
                })
            }
            "fragment" => {
                self.bump();
                let name = self.ident("a fragment name")?;
                let over = self.over()?;
                self.expect(Tok::LBrace)?;
                let mut formulas = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    let p = self.pos();
                    let f = self.formula()?;
                    self.expect(Tok::Semi)?;
                    formulas.push((f, p));
                }
                Ok(Item::Fragment {
                    name,
                    over,
                    formulas,
                })
            }
            "formula" => {
                self.bump();
                let p = self.pos();
                let f = self.formula()?;
                self.expect(Tok::Semi)?;
                Ok(Item::Formula(f, p))
            }
            _ if formula_doc => {
                let p = self.pos();
                let f = self.formula()?;
                if !self.eat(&Tok::Semi) && *self.peek() != Tok::Eof {
                    return self.unexpected("`;` or end of input");
                }
                Ok(Item::Formula(f, p))
            }
            _ => self.unexpected("a declaration"),
        }
    }

    fn over(&mut self) -> PResult<Option<Name>> {
        if self.is_word("over") {
            self.bump();
            Ok(Some(self.ident("a signature name")?))
        } else {
            Ok(None)
        }
    }

    fn sort_list(&mut self) -> PResult<Vec<Name>> {
        let mut out = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                out.push(self.ident("a sort")?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(out)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.unexpected("a declaration"),
        };
        self.bump();
        let d = match word.as_str() {
            "sort" => {
                let mut names = vec![self.ident("a sort name")?];
                while self.eat(&Tok::Comma) {
                    names.push(self.ident("a sort name")?);
                }
                Decl::Sort(names)
            }
            "rel" => {
                let name = self.symbol("a relation name")?;
                let sorts = self.sort_list()?;
                Decl::Rel { name, sorts }
            }
            "fun" => {
                let name = self.ident("a function name")?;
                let args = self.sort_list()?;
                self.expect(Tok::Colon)?;
                let result = self.ident("a result sort")?;
                Decl::Fun { name, args, result }
            }
            "const" => {
                let name = self.ident("a constant name")?;
                self.expect(Tok::Colon)?;
                let sort = self.ident("a sort")?;
                Decl::Const { name, sort }
            }
            _ => {
                self.i -= 1;
                return self.unexpected("`sort`, `rel`, `fun` or `const`");
            }
        };
        self.expect(Tok::Semi)?;
        Ok(d)
    }

    fn theory(&mut self) -> PResult<Item> {
        self.bump();
        let name = self.ident("a theory name")?;
        let kind = if self.eat(&Tok::Colon) {
            let (mut s, p) = self.ident("a theory kind")?;
            while matches!(self.peek(), Tok::Op(o) if o == "-") {
                self.bump();
                let (t, _) = self.ident("a theory kind")?;
                s.push('-');
                s.push_str(&t);
            }
            Some((s, p))
        } else {
            None
        };
        let over = self.over()?;
        self.expect(Tok::LBrace)?;
        let mut axioms = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if !self.is_word("axiom") {
                return self.unexpected("`axiom` or `}`");
            }
            let p = self.bump().pos;
            let f = self.formula()?;
            self.expect(Tok::Semi)?;
            axioms.push((f, p));
        }
        Ok(Item::Theory {
            name,
            kind,
            over,
            axioms,
        })
    }

    fn structure(&mut self) -> PResult<Item> {
        self.bump();
        let name = self.ident("a structure name")?;
        let over = self.over()?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let ename = self.symbol("a sort, relation, function or constant name")?;
            self.expect(Tok::Eq)?;
            let value = if *self.peek() == Tok::LBrace {
                self.bump();
                let mut elems = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        elems.push(self.set_elem()?);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Value::Set(elems)
            } else {
                Value::Elem(self.ident("an element")?)
            };
            self.expect(Tok::Semi)?;
            entries.push(Entry { name: ename, value });
        }
        Ok(Item::Structure {
            name,
            over,
            entries,
        })
    }

    fn set_elem(&mut self) -> PResult<SetElem> {
        if *self.peek() == Tok::LParen {
            let p = self.bump().pos;
            let mut parts = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    parts.push(self.ident("an element")?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            if self.eat(&Tok::Arrow) {
                let v = self.ident("an element")?;
                return Ok(SetElem::Map(parts, v, p));
            }
            Ok(SetElem::Tuple(parts, p))
        } else {
            Ok(SetElem::Atom(self.ident("an element or tuple")?))
        }
    }

    pub fn formula(&mut self) -> PResult<FAst> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(FAst::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<FAst> {
        let first = self.conjunction()?;
        if *self.peek() != Tok::Pipe {
            return Ok(first);
        }
        let mut cs = vec![first];
        while self.eat(&Tok::Pipe) {
            cs.push(self.conjunction()?);
        }
        Ok(FAst::Or(cs))
    }

    fn conjunction(&mut self) -> PResult<FAst> {
        let first = self.unary()?;
        if *self.peek() != Tok::Amp {
            return Ok(first);
        }
        let mut cs = vec![first];
        while self.eat(&Tok::Amp) {
            cs.push(self.unary()?);
        }
        Ok(FAst::And(cs))
    }

    fn unary(&mut self) -> PResult<FAst> {
        if self.eat(&Tok::Bang) {
            return Ok(FAst::Not(Box::new(self.unary()?)));
        }
        if self.is_word("forall") || self.is_word("exists") {
            let exists = self.is_word("exists");
            self.bump();
            let mut binders = Vec::new();
            loop {
                let (name, p) = self.var_name()?;
                let ann = if *self.peek() == Tok::Colon
                    && matches!(self.peek_at(1), Tok::Ident(_))
                    && matches!(self.peek_at(2), Tok::Comma | Tok::Colon)
                {
                    self.bump();
                    Some(self.ident("a sort")?)
                } else {
                    None
                };
                binders.push((name, ann, p));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Colon)?;
            let body = self.formula()?;
            return Ok(FAst::Quant {
                exists,
                binders,
                body: Box::new(body),
            });
        }
        self.primary()
    }

    fn var_name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s)
                if !KEYWORDS.contains(&s.as_str()) && !FORMULA_WORDS.contains(&s.as_str()) =>
            {
                let p = self.bump().pos;
                Ok((s, p))
            }
            _ => self.unexpected("a variable"),
        }
    }

    fn list(&mut self) -> PResult<Vec<FAst>> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if self.eat(&Tok::RBracket) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn primary(&mut self) -> PResult<FAst> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(FAst::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(FAst::False)
            }
            Tok::Ident(s) if (s == "And" || s == "Or") && *self.peek_at(1) == Tok::LBracket => {
                self.bump();
                let cs = self.list()?;
                Ok(if s == "And" {
                    FAst::And(cs)
                } else {
                    FAst::Or(cs)
                })
            }
            Tok::Ident(s)
                if !KEYWORDS.contains(&s.as_str()) && !FORMULA_WORDS.contains(&s.as_str()) =>
            {
                let t = self.term()?;
                match self.peek().clone() {
                    Tok::Eq => {
                        let p = self.bump().pos;
                        let rhs = self.term()?;
                        Ok(FAst::Eq(t, rhs, p))
                    }
                    Tok::Op(op) => {
                        let p = self.bump().pos;
                        let rhs = self.term()?;
                        Ok(FAst::Rel {
                            name: op,
                            args: vec![t, rhs],
                            pos: p,
                        })
                    }
                    _ => match t {
                        TAst::Name {
                            name,
                            ann: None,
                            pos,
                        } => Ok(FAst::Rel {
                            name,
                            args: Vec::new(),
                            pos,
                        }),
                        TAst::App { name, args, pos } => Ok(FAst::Rel { name, args, pos }),
                        TAst::Name { .. } => self.unexpected("`=` or a relation symbol"),
                    },
                }
            }
            _ => self.unexpected("a formula"),
        }
    }

    fn term(&mut self) -> PResult<TAst> {
        let (name, pos) = self.var_name()?;
        if self.eat(&Tok::LParen) {
            let mut args = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    args.push(self.term()?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            return Ok(TAst::App { name, args, pos });
        }
        let ann = if *self.peek() == Tok::Colon && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            Some(self.ident("a sort")?)
        } else {
            None
        };
        Ok(TAst::Name { name, ann, pos })
    }
}
