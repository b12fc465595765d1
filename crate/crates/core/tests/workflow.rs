//! End-to-end use of the public API on documents written inline.

use std::sync::Arc;

use poslog::forcing::{forces, is_generic, ForcingContext};
use poslog::morley::{close_fragment, expand, morleyize, reduct_check};
use poslog::semantics::is_pec;
use poslog::text::{parse, parse_formula, Parsed, SourceDocument};
use poslog::types::{pmc_check, type_space};
use poslog::{classify, Error, Limits, Theory, UniverseClass, Var};

const THEORY: &str = "#poslog v1 theory
signature Tour {
  sort V;
  rel R(V, V);
}
theory T_tour : h-inductive over Tour {
  axiom forall x: R(x, x) -> false;
  axiom forall x, y: R(x, y) & R(y, x) -> false;
}
";

const CLASS: &str = "#poslog v1 class
signature Tour {
  sort V;
  rel R(V, V);
}
structure P1 over Tour {
  V = {a};
  R = {};
}
structure A2 over Tour {
  V = {a, b};
  R = {(a, b)};
}
structure T3 over Tour {
  V = {a, b, c};
  R = {(a, b), (b, c), (c, a)};
}
class tours over Tour { P1, A2, T3 }
";

fn load() -> (Arc<Theory>, UniverseClass) {
    let Parsed::Theory(t) = parse(&SourceDocument::from_text(THEORY).unwrap()).unwrap() else {
        panic!("not a theory")
    };
    let Parsed::Class(c) = parse(&SourceDocument::from_text(CLASS).unwrap()).unwrap() else {
        panic!("not a class")
    };
    let c = c.with_theory(t.clone()).unwrap();
    (t, c)
}

fn xy() -> Vec<Var> {
    vec![Var::new("V", 0), Var::new("V", 1)]
}

#[test]
fn axioms_classify_as_h_universal() {
    let (t, _) = load();
    for s in &t.sentences {
        assert!(classify(&t.signature, s).unwrap().h_universal_basic);
    }
}

#[test]
fn the_cyclic_tournament_is_the_only_pec_member() {
    let (_, c) = load();
    let verdicts: Vec<bool> = c
        .members
        .iter()
        .map(|m| is_pec(m, &c).unwrap().pec)
        .collect();
    assert_eq!(verdicts, [false, false, true]);
    assert_eq!(c.pec_members()[0].name, "T3");
}

#[test]
fn type_space_over_the_cycle() {
    let (_, c) = load();
    let sp = type_space(&c, &xy(), 1, Limits::default()).unwrap();
    // Equal, forward and backward pairs of the 3-cycle.
    assert_eq!(sp.len(), 3);
    let p = pmc_check(&c, &xy(), 1, Limits::default()).unwrap();
    let forward = parse_formula(&c.signature, "R(x, y)").unwrap();
    assert!(p.assignment.iter().any(|(a, _)| *a == forward));
}

#[test]
fn morleyisation_of_the_axioms() {
    let (t, c) = load();
    let f = close_fragment(
        t.signature.clone(),
        t.sentences.iter().cloned(),
        Limits::default(),
    )
    .unwrap();
    let mt = morleyize(&t, &f).unwrap();
    for m in &c.members {
        assert!(
            reduct_check(&mt, &expand(&mt, m).unwrap())
                .unwrap()
                .passed(),
            "{}",
            m.name
        );
    }
}

#[test]
fn forcing_in_the_cycle() {
    let (_, c) = load();
    let ctx = ForcingContext::new(&c, &xy(), 1, Limits::default()).unwrap();
    let t3 = c.member("T3").unwrap();
    let edge = parse_formula(&c.signature, "R(x, y)").unwrap();
    assert!(forces(t3, &edge, &[0, 1], &ctx).unwrap());
    assert!(!forces(t3, &edge, &[1, 0], &ctx).unwrap());
    assert!(is_generic("T3", &ctx).unwrap().generic);
}

#[test]
fn diagnostics_carry_positions() {
    let broken = THEORY.replace("R(x, x) -> false", "R(x, x) -> ");
    let Err(Error::Parse(ds)) = parse(&SourceDocument::from_text(&broken).unwrap()) else {
        panic!("expected a parse error")
    };
    assert_eq!(ds[0].line, 7);
    let unknown = parse_formula(&load().0.signature, "S(x, y)");
    assert!(unknown.is_err());
    let ill = parse_formula(&load().0.signature, "R(x)");
    assert!(ill.is_err());
}
