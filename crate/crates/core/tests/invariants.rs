//! Property tests over random small structures, each against an oracle
//! written independently of the library code it checks.

use std::collections::BTreeSet;
use std::sync::{Arc, LazyLock};

use proptest::prelude::*;

use poslog::forcing::back_and_forth;
use poslog::geometric::dnf;
use poslog::morley::{depth_fragment, expand, morleyize, reduct_check, MorleyizedTheory};
use poslog::semantics::{eval_at, homomorphisms, is_immersion};
use poslog::text::{parse_formula, print_formula};
use poslog::{
    canonicalize, corpus, enumerate_first_order, enumerate_positive, FiniteStructure, Formula,
    Limits, Signature, Var,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn sig() -> Arc<Signature> {
    corpus::graph_signature()
}

fn xy() -> Vec<Var> {
    vec![Var::new("V", 0), Var::new("V", 1)]
}

static POSITIVE: LazyLock<Vec<Formula>> =
    LazyLock::new(|| enumerate_positive(&sig(), &xy(), 2, Limits::default()).unwrap());
static FIRST_ORDER: LazyLock<Vec<Formula>> =
    LazyLock::new(|| enumerate_first_order(&sig(), &xy(), 1, Limits::default()).unwrap());
static MORLEY: LazyLock<MorleyizedTheory> = LazyLock::new(|| {
    let t = corpus::theory("t_graph.plt").unwrap();
    let f = depth_fragment(&t, &[Var::new("V", 0)], 1, Limits::default()).unwrap();
    morleyize(&t, &f).unwrap()
});

fn digraph(n: usize, edges: &BTreeSet<(usize, usize)>) -> FiniteStructure {
    let ts: Vec<[usize; 2]> = edges.iter().map(|&(i, j)| [i, j]).collect();
    let refs: Vec<&[usize]> = ts.iter().map(|t| t.as_slice()).collect();
    FiniteStructure::relational(&format!("D{n}"), sig(), &NAMES[..n], &[("E", &refs)]).unwrap()
}

/// A relation on `1..=max` points given by an edge mask.
fn arb_digraph(max: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..=n * n).prop_map(move |es| digraph(n, &es))
    })
}

/// An irreflexive symmetric graph on `1..=max` points.
fn arb_graph(max: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..=n * n).prop_map(move |es| {
            let sym: BTreeSet<(usize, usize)> = es
                .into_iter()
                .filter(|(i, j)| i != j)
                .flat_map(|(i, j)| [(i, j), (j, i)])
                .collect();
            digraph(n, &sym)
        })
    })
}

fn pairs(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| vec![i, j]))
        .collect()
}

fn edge(m: &FiniteStructure, i: usize, j: usize) -> bool {
    m.holds(&"E".into(), &[i, j])
}

fn size(m: &FiniteStructure) -> usize {
    m.total_size()
}

/// Every map `0..n -> 0..k`, as vectors.
fn all_maps(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| (0..k).map(move |e| [p.clone(), vec![e]].concat()))
            .collect();
    }
    out
}

fn edge_preserving(a: &FiniteStructure, b: &FiniteStructure, h: &[usize]) -> bool {
    pairs(size(a))
        .iter()
        .all(|t| !edge(a, t[0], t[1]) || edge(b, h[t[0]], h[t[1]]))
}

fn brute_isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    let n = size(a);
    n == size(b)
        && all_maps(n, n).iter().any(|h| {
            BTreeSet::from_iter(h.iter()).len() == n
                && pairs(n)
                    .iter()
                    .all(|t| edge(a, t[0], t[1]) == edge(b, h[t[0]], h[t[1]]))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_is_idempotent_and_sound(
        i in 0..FIRST_ORDER.len(),
        j in 0..POSITIVE.len(),
        m in arb_digraph(3),
    ) {
        for f in [&FIRST_ORDER[i], &POSITIVE[j]] {
            let c = canonicalize(f);
            prop_assert_eq!(&canonicalize(&c), &c);
            for t in pairs(size(&m)) {
                prop_assert_eq!(eval_at(&m, f, &xy(), &t), eval_at(&m, &c, &xy(), &t));
            }
        }
    }

    #[test]
    fn printing_then_parsing_is_the_identity(i in 0..FIRST_ORDER.len(), j in 0..POSITIVE.len()) {
        let s = sig();
        for f in [&FIRST_ORDER[i], &POSITIVE[j]] {
            prop_assert_eq!(&parse_formula(&s, &print_formula(&s, f)).unwrap(), f);
        }
    }

    #[test]
    fn normal_forms_agree_with_their_formula(j in 0..POSITIVE.len(), m in arb_digraph(4)) {
        let f = &POSITIVE[j];
        let n = dnf(f, Limits::default()).unwrap().to_formula();
        for t in pairs(size(&m)) {
            prop_assert_eq!(eval_at(&m, f, &xy(), &t), eval_at(&m, &n, &xy(), &t));
        }
    }

    #[test]
    fn homomorphisms_are_exactly_the_edge_preserving_maps(a in arb_digraph(3), b in arb_digraph(3)) {
        let found: BTreeSet<Vec<usize>> = homomorphisms(&a, &b)
            .unwrap()
            .into_iter()
            .map(|h| h.maps[&"V".into()].clone())
            .collect();
        let brute: BTreeSet<Vec<usize>> = all_maps(size(&a), size(&b))
            .into_iter()
            .filter(|h| edge_preserving(&a, &b, h))
            .collect();
        prop_assert_eq!(found, brute);
    }

    #[test]
    fn homomorphisms_preserve_and_immersions_reflect(
        a in arb_digraph(3),
        b in arb_digraph(3),
        j in 0..POSITIVE.len(),
    ) {
        let f = &POSITIVE[j];
        for h in homomorphisms(&a, &b).unwrap() {
            let map = &h.maps[&"V".into()];
            let imm = is_immersion(&a, &b, &h).unwrap();
            for t in pairs(size(&a)) {
                let ht = vec![map[t[0]], map[t[1]]];
                let (src, dst) = (eval_at(&a, f, &xy(), &t), eval_at(&b, f, &xy(), &ht));
                prop_assert!(!src || dst, "{} not preserved", f);
                if imm.immersion {
                    prop_assert_eq!(src, dst, "{} not reflected", f);
                }
            }
            if let Some(w) = &imm.witness {
                let at: Vec<usize> = w.elements.iter().map(|(_, e)| *e).collect();
                let img: Vec<usize> = at.iter().map(|&e| map[e]).collect();
                prop_assert!(!eval_at(&a, &w.formula, &w.vars, &at));
                prop_assert!(eval_at(&b, &w.formula, &w.vars, &img));
            }
        }
    }

    #[test]
    fn back_and_forth_decides_isomorphism(a in arb_digraph(3), b in arb_digraph(3)) {
        let eq = back_and_forth(&a, &b, 0, Limits::default()).unwrap().equivalent();
        prop_assert_eq!(eq, brute_isomorphic(&a, &b));
    }

    #[test]
    fn expansion_round_trips_and_catches_edits(g in arb_graph(4), k in any::<prop::sample::Index>()) {
        let mt = &*MORLEY;
        let e = expand(mt, &g).unwrap();
        prop_assert!(reduct_check(mt, &e).unwrap().passed());
        let i = k.index(mt.fragment.len());
        let r = mt.fragment.symbol(i);
        let sorts: Vec<_> = mt.fragment.free_tuple(i).iter().map(|v| v.sort.clone()).collect();
        let mut ts = e.relation(&r).unwrap().tuples().clone();
        let t = e.tuples(&sorts)[0].clone();
        if !ts.remove(&t) {
            ts.insert(t);
        }
        let bad = e.with_relation(&r, ts).unwrap();
        prop_assert!(!reduct_check(mt, &bad).unwrap().passed());
    }
}
