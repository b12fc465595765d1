use std::collections::BTreeSet;

use super::*;
use crate::corpus;
use crate::text::parse_formula;

fn f(sig: &Signature, s: &str) -> Formula {
    parse_formula(sig, s).unwrap()
}

fn x() -> Vec<Var> {
    vec![Var::new("V", 0)]
}

fn xy() -> Vec<Var> {
    vec![Var::new("V", 0), Var::new("V", 1)]
}

fn member(c: &UniverseClass, name: &str) -> FiniteStructure {
    c.member(name).unwrap().clone()
}

fn only(m: FiniteStructure) -> UniverseClass {
    UniverseClass::new("single", m.signature.clone(), vec![m], None).unwrap()
}

fn chains() -> UniverseClass {
    corpus::class("chains3.pls").unwrap()
}

#[test]
fn vertex_type_in_triangle() {
    let g = corpus::class("graphs3.pls").unwrap();
    let sig = g.signature.clone();
    let p = tp_pos(&member(&g, "K3"), &x(), &[0], 0, Limits::default()).unwrap();
    assert!(p.contains(&f(&sig, "x=x")));
    assert!(!p.contains(&f(&sig, "E(x,x)")));
    assert!(p.contains(&Formula::True) && !p.contains(&Formula::False));
}

#[test]
fn path_endpoints_at_depth_two() {
    let g = corpus::class("graphs3.pls").unwrap();
    let sig = g.signature.clone();
    let p2 = member(&g, "G3_2");
    // Vertex 0 is the centre of the path, so 1 and 2 are the endpoints.
    let p = tp_pos(&p2, &xy(), &[1, 2], 2, Limits::default()).unwrap();
    assert!(p.contains(&f(&sig, "exists z: E(x,z) & E(z,y)")));
    assert!(!p.contains(&f(&sig, "E(x,y)")));
}

#[test]
fn types_are_isomorphism_invariant() {
    let g = corpus::class("graphs3.pls").unwrap();
    let p2 = member(&g, "G3_2");
    let a = tp_pos(&p2, &xy(), &[1, 2], 2, Limits::default()).unwrap();
    let b = tp_pos(&p2, &xy(), &[2, 1], 2, Limits::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn triangle_has_one_vertex_type() {
    let g = corpus::class("graphs3.pls").unwrap();
    let s = type_space(&only(member(&g, "K3")), &x(), 1, Limits::default()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.types[0].realizations.len(), 3);
}

#[test]
fn sentence_space_is_a_point() {
    let s = type_space(&chains(), &[], 2, Limits::default()).unwrap();
    assert_eq!(s.len(), 1);
}

#[test]
fn chain_pairs_split_by_order_at_depth_zero() {
    let c = chains();
    let s = type_space(&c, &xy(), 0, Limits::default()).unwrap();
    // Oracle: classify each pec pair by comparing positions.
    let mut want = BTreeSet::new();
    for r in s.realizations().map(|(_, r)| r) {
        want.insert(r.tuple[0].cmp(&r.tuple[1]));
    }
    assert_eq!(s.len(), want.len());
    assert_eq!(s.len(), 3);
    for p in &s.types {
        let cls: BTreeSet<_> = p
            .realizations
            .iter()
            .map(|r| r.tuple[0].cmp(&r.tuple[1]))
            .collect();
        assert_eq!(cls.len(), 1);
    }
}

#[test]
fn empty_pec_set_is_an_error() {
    let g = corpus::bare_class("graphs3.pls").unwrap();
    let k2 = member(&g, "K2");
    let k3 = member(&g, "K3");
    let c = UniverseClass::new("c", g.signature.clone(), vec![k2, k3], None).unwrap();
    let k3_only_pec = type_space(&c, &x(), 0, Limits::default()).unwrap();
    assert_eq!(k3_only_pec.len(), 1);
    let empty = UniverseClass::new("e", g.signature.clone(), Vec::new(), None).unwrap();
    assert_eq!(
        type_space(&empty, &x(), 0, Limits::default()).unwrap_err(),
        Error::EmptyPositiveClass
    );
}

#[test]
fn basic_sets_respect_connectives() {
    let c = chains();
    let s = type_space(&c, &xy(), 1, Limits::default()).unwrap();
    assert_eq!(s.basic_set(&Formula::True), s.whole());
    assert!(s.basic_set(&Formula::False).is_clear());
    let fs = s.supply.formulas();
    for a in fs.iter().take(40) {
        for b in fs.iter().take(40) {
            let mut and = s.basic_set(a);
            and.intersect_with(&s.basic_set(b));
            assert_eq!(s.basic_set(&Formula::and([a.clone(), b.clone()])), and);
            let mut or = s.basic_set(a);
            or.union_with(&s.basic_set(b));
            assert_eq!(s.basic_set(&Formula::or([a.clone(), b.clone()])), or);
        }
    }
}

#[test]
fn resultant_examples() {
    let c = chains();
    let sig = c.signature.clone();
    let bot = resultant(&c, &Formula::False, &xy(), 0, Limits::default()).unwrap();
    assert!(bot.contains(&Formula::True));
    let top = resultant(&c, &Formula::True, &xy(), 0, Limits::default()).unwrap();
    assert!(top.contains(&Formula::False));
    let supply = Supply::positive(&sig, &xy(), 0, Limits::default()).unwrap();
    for psi in supply.formulas() {
        let realized = c.members.iter().any(|m| {
            m.tuples(&sorting(&xy()))
                .iter()
                .any(|t| eval_at(m, psi, &xy(), t))
        });
        assert_eq!(top.contains(psi), !realized, "{psi}");
    }
    let lt = resultant(&c, &f(&sig, "x<y"), &xy(), 0, Limits::default()).unwrap();
    assert!(lt.contains(&f(&sig, "y<x")) && lt.contains(&f(&sig, "x=y")));
    assert!(!lt.contains(&f(&sig, "x<y")));
}

#[test]
fn resultant_rejects_non_positive() {
    let c = chains();
    let sig = c.signature.clone();
    assert!(resultant(&c, &f(&sig, "!(x<y)"), &xy(), 0, Limits::default()).is_err());
}

#[test]
fn cover_examples() {
    let c = chains();
    let sig = c.signature.clone();
    let s = type_space(&c, &xy(), 0, Limits::default()).unwrap();
    assert!(spectral_complement_cover(&s, &Formula::True)
        .unwrap()
        .covered());
    let r = spectral_complement_cover(&s, &f(&sig, "x<y")).unwrap();
    assert!(r.covered());
    let mut u = s.basic_set(&f(&sig, "y<x"));
    u.union_with(&s.basic_set(&f(&sig, "x=y")));
    assert_eq!(r.complement, u.ones().collect::<Vec<_>>());

    let g = corpus::class("graphs4.pls").unwrap();
    let gsig = g.signature.clone();
    for d in 0..2 {
        let s = type_space(&g, &xy(), d, Limits::default()).unwrap();
        let r = spectral_complement_cover(&s, &f(&gsig, "E(x,y)")).unwrap();
        assert!(r.excess.is_empty());
    }
}

#[test]
fn separation_examples() {
    let c = chains();
    let sig = c.signature.clone();
    let s = type_space(&c, &xy(), 0, Limits::default()).unwrap();
    let lt = f(&sig, "x<y");
    let gt = f(&sig, "y<x");
    let p = s.types.iter().find(|p| p.contains(&lt)).unwrap();
    let q = s.types.iter().find(|p| p.contains(&gt)).unwrap();
    let w = hausdorff_witness(p, q).unwrap();
    assert_eq!(w.formula, lt);
    assert!(w.in_first);
    assert_eq!(
        hausdorff_witness(p, p).unwrap_err(),
        Error::IndistinguishableAtDepth(0)
    );
}

#[test]
fn complement_search_needs_depth_one_for_order() {
    let c = chains();
    let sig = c.signature.clone();
    let lt = f(&sig, "x<y");
    let r0 = pmc_check(&c, &xy(), 0, Limits::default()).unwrap();
    assert!(r0.complement_of(&lt).is_none());
    assert!(r0.failures.contains(&lt));
    assert_eq!(r0.complement_of(&Formula::True), Some(&Formula::False));
    assert_eq!(r0.complement_of(&Formula::False), Some(&Formula::True));
    let r1 = pmc_check(&c, &xy(), 1, Limits::default()).unwrap();
    assert_eq!(r1.complement_of(&lt), Some(&f(&sig, "x=y | y<x")));
}

#[test]
fn constructible_sets() {
    let g = corpus::class("graphs4.pls").unwrap();
    let sig = g.signature.clone();
    let s = type_space(&g, &xy(), 1, Limits::default()).unwrap();
    let top = constructible_eval(&s, &Formula::not(Formula::False)).unwrap();
    assert_eq!(top.extension, s.whole());
    let edge = constructible_eval(&s, &f(&sig, "E(x,y) & !(x=y)")).unwrap();
    // Oracle: in K4 the genuine edges are exactly the off-diagonal pairs.
    for (k, r) in s.realizations() {
        assert_eq!(edge.extension.contains(k), r.tuple[0] != r.tuple[1]);
    }
    let phi = f(&sig, "E(x,y)");
    let contra = Formula::and([phi.clone(), Formula::not(phi)]);
    assert!(constructible_eval(&s, &contra)
        .unwrap()
        .extension
        .is_clear());
    assert!(matches!(
        constructible_eval(&s, &f(&sig, "forall z: E(x,z)")),
        Err(Error::NonConstructible(_))
    ));
}

#[test]
fn constructible_resultant_examples() {
    let g = corpus::class("graphs4.pls").unwrap();
    let sig = g.signature.clone();
    let s = type_space(&g, &xy(), 1, Limits::default()).unwrap();
    let psi = f(&sig, "E(x,y)");
    let r = constructible_resultant(&s, &Formula::not(psi.clone()), 1, Limits::default()).unwrap();
    assert!(r.members.contains(&psi));
    assert_eq!(r.case.case, InductionCase::Negation);
    assert!(r.cover.covered() && r.case.all_covered());

    let pos = constructible_resultant(&s, &psi, 1, Limits::default()).unwrap();
    let res = resultant(&g, &psi, &xy(), 1, Limits::default()).unwrap();
    assert!(res.members.iter().all(|m| pos.members.contains(m)));
    assert_eq!(pos.case.case, InductionCase::Atomic);

    let top = constructible_resultant(&s, &Formula::True, 1, Limits::default()).unwrap();
    assert!(top.members.contains(&Formula::False));
}

#[test]
fn dot_lists_every_basic_set() {
    let c = chains();
    let s = type_space(&c, &xy(), 0, Limits::default()).unwrap();
    let dot = s.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(s.basic_sets().len(), 5);
    assert!(dot.contains("->"));
}
