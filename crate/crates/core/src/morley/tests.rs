use super::*;
use crate::corpus;
use crate::text::{parse, parse_formula, Parsed, SourceDocument};

fn f(sig: &Signature, s: &str) -> Formula {
    parse_formula(sig, s).unwrap()
}

fn empty_theory(sig: &Arc<Signature>) -> Arc<Theory> {
    Arc::new(Theory::new("T0", sig.clone(), [], None).unwrap())
}

fn edge_fragment() -> Fragment {
    let sig = corpus::graph_signature();
    close_fragment(sig.clone(), [f(&sig, "E(x, y)")], Limits::default()).unwrap()
}

fn x() -> Vec<Var> {
    vec![Var::new("V", 0)]
}

#[test]
fn an_atom_closes_with_its_negation() {
    let sig = corpus::graph_signature();
    let fr = edge_fragment();
    assert_eq!(fr.members(), [f(&sig, "E(x, y)"), f(&sig, "!E(x, y)")]);
    assert_eq!(fr.negation_of(0), Some(1));
    assert_eq!(fr.negation_of(1), None);
}

#[test]
fn existential_seed_closure() {
    let sig = corpus::graph_signature();
    let fr = close_fragment(
        sig.clone(),
        [f(&sig, "exists y: E(x, y)")],
        Limits::default(),
    )
    .unwrap();
    for s in [
        "E(x, y)",
        "!E(x, y)",
        "exists y: E(x, y)",
        "!(exists y: E(x, y))",
    ] {
        assert!(fr.contains(&f(&sig, s)), "{s}");
    }
    assert_eq!(fr.len(), 4);
}

#[test]
fn empty_seed_gives_nothing() {
    let sig = corpus::graph_signature();
    let fr = close_fragment(sig.clone(), [], Limits::default()).unwrap();
    assert!(fr.is_empty());
    let mt = morleyize(&empty_theory(&sig), &fr).unwrap();
    assert!(mt.axioms.is_empty());
    let k3 = corpus::class("graphs3.pls")
        .unwrap()
        .member("K3")
        .unwrap()
        .clone();
    let e = expand(&mt, &k3).unwrap();
    assert_eq!(
        e.reduct(sig).unwrap(),
        k3.reduct(k3.signature.clone()).unwrap()
    );
}

#[test]
fn universal_members_become_negated_existentials() {
    let sig = corpus::graph_signature();
    let a = f(&sig, "forall y: E(x, y)");
    let fr = close_fragment(sig.clone(), [a.clone()], Limits::default()).unwrap();
    assert!(fr.members().iter().all(|m| m.head() != Connective::Forall));
    assert!(fr.contains(&f(&sig, "!(exists y: !E(x, y))")));
    assert_eq!(
        fr.index_of(&a),
        fr.index_of(&f(&sig, "!(exists y: !E(x, y))"))
    );
}

#[test]
fn fragment_ceiling() {
    let sig = corpus::graph_signature();
    let e = close_fragment(
        sig.clone(),
        [f(&sig, "exists y: E(x, y)")],
        Limits::default().with_ceiling(3),
    );
    assert!(matches!(e, Err(Error::ResourceCeiling { .. })));
}

#[test]
fn edge_fragment_has_four_axioms() {
    let sig = corpus::graph_signature();
    let mt = morleyize(&empty_theory(&sig), &edge_fragment()).unwrap();
    let count = |c| mt.clause(c).count();
    assert_eq!((count(Clause::I), count(Clause::III)), (2, 2));
    assert_eq!(mt.axioms.len(), 4);
    assert_eq!(mt.signature.relations().len(), 3);
    assert!(mt
        .axioms
        .iter()
        .all(|a| classify_unchecked(&a.sentence()).g_inductive_basic));
}

#[test]
fn conjunction_axioms_use_the_negated_conjuncts() {
    let sig = corpus::graph_signature();
    let fr = close_fragment(sig.clone(), [f(&sig, "E(x, y) & x = y")], Limits::default()).unwrap();
    let mt = morleyize(&empty_theory(&sig), &fr).unwrap();
    let iv: Vec<&Axiom> = mt.clause(Clause::IV).collect();
    assert_eq!(iv.len(), 2);
    let neg = |s: &str| fr.relation_atom(fr.index_of(&f(&sig, s)).unwrap());
    let negs = Formula::Or([neg("!E(x, y)"), neg("!(x = y)")].into());
    let conj = fr.relation_atom(iv[0].member);
    assert_eq!(
        iv[0].body,
        Formula::implies(
            Formula::And([conj.clone(), negs.clone()].into()),
            Formula::False
        )
    );
    let flat = Formula::Or([conj, neg("!E(x, y)"), neg("!(x = y)")].into());
    assert_eq!(iv[1].body, Formula::implies(Formula::True, flat));
}

#[test]
fn depth_fragment_output_reparses() {
    for file in ["t_graph.plt", "t_lo.plt", "t_unary.plt"] {
        let t = corpus::theory(file).unwrap();
        let fr = depth_fragment(&t, &[Var::new("V", 0)], 1, Limits::default()).unwrap();
        let mt = morleyize(&t, &fr).unwrap();
        let Parsed::Theory(back) =
            parse(&SourceDocument::from_text(&mt.to_plt()).unwrap()).unwrap()
        else {
            panic!("not a theory")
        };
        assert_eq!(*back, mt.theory().unwrap());
    }
}

#[test]
fn theory_sentences_become_propositional_constants() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let fr = close_fragment(
        t.signature.clone(),
        t.sentences.iter().cloned(),
        Limits::default(),
    )
    .unwrap();
    let mt = morleyize(&t, &fr).unwrap();
    let vi: Vec<&Axiom> = mt.clause(Clause::VI).collect();
    assert_eq!(vi.len(), 2);
    for a in vi {
        assert!(t.sentences.iter().any(|s| fr.index_of(s) == Some(a.member)));
        assert_eq!(a.body, Formula::atom(fr.symbol(a.member), vec![]));
        assert!(mt
            .signature
            .relation(&fr.symbol(a.member))
            .unwrap()
            .is_empty());
    }
}

#[test]
fn uncovered_sentence_is_refused() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let e = morleyize(&t, &edge_fragment()).unwrap_err();
    assert!(matches!(e, Error::FragmentCoverage(_)));
    let lo = corpus::theory("t_lo.plt").unwrap();
    let e = morleyize(&lo, &edge_fragment()).unwrap_err();
    assert!(matches!(e, Error::SignatureMismatch(_)));
}

#[test]
fn triangle_expansion_tables() {
    let sig = corpus::graph_signature();
    let fr = edge_fragment();
    let mt = morleyize(&empty_theory(&sig), &fr).unwrap();
    let k3 = corpus::class("graphs3.pls")
        .unwrap()
        .member("K3")
        .unwrap()
        .clone();
    let e = expand(&mt, &k3).unwrap();
    let table = |i: usize| e.relation(&fr.symbol(i)).unwrap().tuples().clone();
    let all = k3.tuples(&sorting(fr.free_tuple(0)));
    let edges: BTreeSet<Vec<usize>> = all.iter().filter(|t| t[0] != t[1]).cloned().collect();
    let diagonal: BTreeSet<Vec<usize>> = all.iter().filter(|t| t[0] == t[1]).cloned().collect();
    assert_eq!(table(0), edges);
    assert_eq!(table(1), diagonal);
    assert!(reduct_check(&mt, &e).unwrap().passed());
}

#[test]
fn satisfied_sentences_are_true_constants() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let fr = close_fragment(
        t.signature.clone(),
        t.sentences.iter().cloned(),
        Limits::default(),
    )
    .unwrap();
    let mt = morleyize(&t, &fr).unwrap();
    let c = corpus::class("graphs3.pls").unwrap();
    for m in &c.members {
        let e = expand(&mt, m).unwrap();
        for a in mt.clause(Clause::VI) {
            assert!(e.holds(&fr.symbol(a.member), &[]));
        }
        assert!(reduct_check(&mt, &e).unwrap().passed(), "{}", m.name);
    }
}

#[test]
fn non_models_are_reported() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let fr = close_fragment(
        t.signature.clone(),
        t.sentences.iter().cloned(),
        Limits::default(),
    )
    .unwrap();
    let mt = morleyize(&t, &fr).unwrap();
    let loop1 = FiniteStructure::relational("L", t.signature.clone(), &["a"], &[("E", &[&[0, 0]])])
        .unwrap();
    assert!(matches!(expand(&mt, &loop1), Err(Error::NotAModel { .. })));
}

#[test]
fn enlarged_edge_relation_breaks_clause_one() {
    let sig = corpus::graph_signature();
    let fr = edge_fragment();
    let mt = morleyize(&empty_theory(&sig), &fr).unwrap();
    let k3 = corpus::class("graphs3.pls")
        .unwrap()
        .member("K3")
        .unwrap()
        .clone();
    let e = expand(&mt, &k3).unwrap();
    let r = fr.symbol(0);
    let mut t = e.relation(&r).unwrap().tuples().clone();
    t.insert(vec![0, 0]);
    let bad = e.with_relation(&r, t).unwrap();
    let rep = reduct_check(&mt, &bad).unwrap();
    assert!(!rep.passed());
    let v = &rep.axiom_violations[0];
    assert_eq!(
        (v.clause, v.member, v.tuple.clone()),
        (Clause::I, 0, vec![0, 0])
    );
    assert!(rep.axiom_violations.iter().any(|v| v.clause == Clause::III));
    assert_eq!(rep.pointwise_violations.len(), 1);
    assert_eq!(rep.pointwise_violations[0].case, Connective::Atomic);
}

#[test]
fn shrunk_non_edge_relation_breaks_totality() {
    let sig = corpus::graph_signature();
    let fr = edge_fragment();
    let mt = morleyize(&empty_theory(&sig), &fr).unwrap();
    let k3 = corpus::class("graphs3.pls")
        .unwrap()
        .member("K3")
        .unwrap()
        .clone();
    let e = expand(&mt, &k3).unwrap();
    let r = fr.symbol(1);
    let mut t = e.relation(&r).unwrap().tuples().clone();
    t.remove(&vec![1, 1]);
    let rep = reduct_check(&mt, &e.with_relation(&r, t).unwrap()).unwrap();
    assert_eq!(rep.axiom_violations.len(), 1);
    let v = &rep.axiom_violations[0];
    assert_eq!(
        (v.clause, v.member, v.tuple.clone()),
        (Clause::III, 0, vec![1, 1])
    );
    assert_eq!(
        v.sentence,
        mt.clause(Clause::III).nth(1).unwrap().sentence()
    );
    assert_eq!(rep.pointwise_violations[0].case, Connective::Not);
}

#[test]
fn functor_check_examples() {
    let sig = corpus::graph_signature();
    let mt = morleyize(&empty_theory(&sig), &edge_fragment()).unwrap();
    let g = corpus::class("graphs3.pls").unwrap();
    let (k2, k3) = (g.member("K2").unwrap(), g.member("K3").unwrap());
    let v = Sym::new("V");
    let id = BTreeMap::from([(v.clone(), vec![0, 1, 2])]);
    let r = functor_check(&mt, &id, k3, k3).unwrap();
    assert!(r.homomorphism && r.elementary);
    // an edge-preserving map that creates an edge from a non-edge
    let n2 = g.member("N2").unwrap();
    let r = functor_check(&mt, &BTreeMap::from([(v.clone(), vec![0, 1])]), n2, k2).unwrap();
    assert!(!r.homomorphism && !r.elementary && r.agrees());
    assert_eq!(r.witness.unwrap().0, 1);
    let r = functor_check(&mt, &BTreeMap::from([(v.clone(), vec![1, 2, 0])]), k3, k3).unwrap();
    assert!(r.homomorphism && r.elementary);
}

#[test]
fn functor_suite_agrees_on_small_graphs() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let fr = depth_fragment(&t, &x(), 1, Limits::default()).unwrap();
    let mt = morleyize(&t, &fr).unwrap();
    let g = corpus::class("graphs3.pls").unwrap();
    let r = functor_suite(&mt, &g.members).unwrap();
    assert_eq!(r.maps, 607);
    assert!(r.agrees(), "{:?}", r.disagreements.first());
    assert!(r.homomorphisms >= g.members.len());
}

#[test]
fn plt_output_reparses_and_is_stable() {
    let t = corpus::theory("t_graph.plt").unwrap();
    let fr = close_fragment(
        t.signature.clone(),
        t.sentences.iter().cloned(),
        Limits::default(),
    )
    .unwrap();
    let mt = morleyize(&t, &fr).unwrap();
    let text = mt.to_plt();
    assert_eq!(text, morleyize(&t, &fr).unwrap().to_plt());
    assert!(text.contains("# clause (i) ") && text.contains("# clause (vi) "));
    let Parsed::Theory(back) = parse(&SourceDocument::from_text(&text).unwrap()).unwrap() else {
        panic!("not a theory")
    };
    assert_eq!(back.kind, TheoryKind::GInductive);
    assert_eq!(*back, mt.theory().unwrap());
    assert_eq!(
        mt.signature.relations().len(),
        t.signature.relations().len() + fr.len()
    );
}
