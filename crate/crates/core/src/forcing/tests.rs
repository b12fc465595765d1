use std::collections::BTreeSet;

use super::*;
use crate::corpus;
use crate::logic::depth;
use crate::semantics::{is_isomorphic, FiniteStructure};
use crate::text::parse_formula;

fn graphs() -> UniverseClass {
    corpus::class("graphs3.pls").unwrap()
}

fn xy() -> Vec<Var> {
    vec![Var::new("V", 0), Var::new("V", 1)]
}

fn only(m: &FiniteStructure) -> UniverseClass {
    UniverseClass::new("single", m.signature.clone(), vec![m.clone()], None).unwrap()
}

#[test]
fn edge_misses_a_common_neighbour() {
    let g = graphs();
    let r = is_existential(&g, "K2", 1, Limits::default()).unwrap();
    assert!(!r.existential && !r.pec);
    let c = r.counterexample.unwrap();
    assert_eq!(c.continuation.target, "K3");
    let (x, y1, y2) = (&c.vars[0], &c.vars[1], &c.vars[2]);
    assert_eq!(c.pi.len(), 2);
    assert!(c.pi.iter().all(|f| depth(f) == 0));
    // each formula is an edge between x and a different parameter
    let ends: BTreeSet<&Var> =
        c.pi.iter()
            .map(|f| {
                let vs = f.free_vars();
                assert!(f.to_string().contains('E') && vs.contains(x) && vs.len() == 2);
                if vs.contains(y1) {
                    y1
                } else {
                    y2
                }
            })
            .collect();
    assert_eq!(ends.len(), 2);
    assert_ne!(c.params[0], c.params[1]);
}

#[test]
fn existential_members_are_pec() {
    let g = graphs();
    let checker = ExistentialChecker::new(&g, 1, EXISTENTIAL_PARAMS, Limits::default()).unwrap();
    for m in &g.members {
        let r = checker.check(&g, &m.name).unwrap();
        assert!(r.implies_pec(), "{}", m.name);
        if r.pec {
            assert!(r.existential, "{}", m.name);
        }
    }
}

#[test]
fn singleton_pec_class_is_existential() {
    let g = graphs();
    let k3 = only(g.member("K3").unwrap())
        .with_theory(g.theory.clone().unwrap())
        .unwrap();
    assert!(
        is_existential(&k3, "K3", 1, Limits::default())
            .unwrap()
            .existential
    );
}

#[test]
fn positive_members_of_the_type_are_forced() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default()).unwrap();
    let m = g.member("K2").unwrap();
    for (i, f) in ctx.space.supply.formulas().iter().enumerate() {
        if ctx.space.supply.profile(m, &[0, 1]).contains(i) {
            assert!(forces(m, f, &[0, 1], &ctx).unwrap(), "{f}");
        }
    }
}

#[test]
fn forcing_of_positive_formulas_in_pec_members_is_membership() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default()).unwrap();
    let k3 = g.member("K3").unwrap();
    for t in k3.tuples(&sorting(&xy())) {
        let k = ctx.space.type_of("K3", &t).unwrap();
        for f in ctx.space.supply.formulas() {
            let member = ctx.space.basic_set(f).contains(k);
            assert_eq!(forces(k3, f, &t, &ctx).unwrap(), member, "{f} at {t:?}");
        }
    }
}

#[test]
fn forcing_moves_along_a_homomorphism() {
    let g = graphs();
    let sig = g.signature.clone();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default()).unwrap();
    let (n2, k2) = (g.member("N2").unwrap(), g.member("K2").unwrap());
    let f = parse_formula(&sig, "!(x = y)").unwrap();
    // N2 does not force x != y: the pair may still collapse
    assert!(!forces(n2, &f, &[0, 1], &ctx).unwrap());
    assert!(forces(k2, &f, &[0, 1], &ctx).unwrap());
}

#[test]
fn depth_zero_pec_members_are_generic() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 0, Limits::default()).unwrap();
    for m in g.pec_members() {
        assert!(is_generic(&m.name, &ctx).unwrap().generic, "{}", m.name);
    }
}

#[test]
fn genericity_matches_existence_on_small_graphs() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 2, Limits::default()).unwrap();
    for m in &g.members {
        let gen = is_generic(&m.name, &ctx).unwrap();
        let ex = ctx.existential(&m.name).unwrap();
        assert_eq!(gen.generic, ex.existential, "{}", m.name);
        if !ex.existential {
            let fail = gen.first_failure.unwrap();
            assert_ne!(fail.satisfied, fail.forced);
        }
    }
    let k2 = is_generic("K2", &ctx).unwrap();
    assert!(!k2.generic);
    for c in [Connective::Atomic, Connective::And] {
        assert!(is_generic("K3", &ctx).unwrap().tally(c).passed());
        assert!(k2.tally(c).checked > 0);
    }
}

#[test]
fn pec_members_decide_everything() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default()).unwrap();
    let r = pecte_check("K3", &ctx).unwrap();
    assert!(r.checked > 0 && r.holds(), "{:?}", r.violations.first());
}

#[test]
fn forcing_is_stable_under_continuation() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default()).unwrap();
    let r = stability_check(&ctx).unwrap();
    assert!(r.checked > 0 && r.holds());
}

#[test]
fn non_positive_formulas_need_an_existential_member() {
    let g = graphs();
    let ctx = ForcingContext::new(&g, &xy(), 1, Limits::default())
        .unwrap()
        .with_existential("K2");
    let f = parse_formula(&g.signature, "!E(x, y)").unwrap();
    let e = forces(g.member("K3").unwrap(), &f, &[0, 0], &ctx).unwrap_err();
    assert!(matches!(e, Error::NoExistentialMember(_)));
}

#[test]
fn karp_agrees_with_isomorphism() {
    let g = corpus::class("graphs4.pls").unwrap();
    for m in &g.members {
        for n in &g.members {
            let r = back_and_forth(m, n, 0, Limits::default()).unwrap();
            assert_eq!(
                r.equivalent(),
                is_isomorphic(m, n).unwrap(),
                "{} {}",
                m.name,
                n.name
            );
        }
    }
}

#[test]
fn self_system_contains_the_diagonal() {
    let g = graphs();
    let m = g.member("G3_2").unwrap();
    let r = back_and_forth(m, m, 1, Limits::default()).unwrap();
    assert!(r.equivalent(), "{:?}", r.failure);
    let s = crate::Sym::new("V");
    for i in 0..3 {
        assert!(r.system.contains(&[(s.clone(), i)], &[(s.clone(), i)]));
    }
}

#[test]
fn failure_names_the_missing_partner() {
    let g = graphs();
    let (k1, k2) = (g.member("K1").unwrap(), g.member("K2").unwrap());
    let f = back_and_forth(k1, k2, 0, Limits::default())
        .unwrap()
        .failure
        .unwrap();
    assert_eq!(f.direction, Direction::Forth);
    assert!(f.left.is_empty() && f.element.is_some());
}

#[test]
fn isomorphic_copies_agree() {
    let g = graphs();
    let m = g.member("G3_2").unwrap();
    // relabel the path so its centre moves
    let sig = m.signature.clone();
    let n = FiniteStructure::relational(
        "P",
        sig,
        &["a", "b", "c"],
        &[("E", &[&[1, 0], &[0, 1], &[1, 2], &[2, 1]])],
    )
    .unwrap();
    let r = infinitary_agreement(m, &n, &xy(), &[0, 1], &[1, 0], 2, Limits::default()).unwrap();
    assert!(r.agrees() && r.checked > 1000);
    let same = infinitary_agreement(m, m, &xy(), &[2, 2], &[2, 2], 1, Limits::default()).unwrap();
    assert!(same.agrees());
}

#[test]
fn existential_maps_are_elementary() {
    let g = graphs();
    let r = existential_preservation(&g, &xy(), 1, Limits::default()).unwrap();
    assert_eq!(r.members, ["K3"]);
    assert!(r.homs == 6 && r.holds());
}
