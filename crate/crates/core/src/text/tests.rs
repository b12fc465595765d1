use super::*;

const T_LO: &str = "#poslog v1 theory
sort V;
rel <(V, V);
theory T_lo { axiom forall x,y,z: x<y & y<z -> x<z; axiom forall x: x<x -> false; axiom forall x,y: true -> x<y | y<x | x=y; }
";

fn doc(s: &str) -> SourceDocument {
    SourceDocument::from_text(s).unwrap()
}

#[test]
fn graph_signature() {
    let Parsed::Signature(s) = parse(&doc("#poslog v1 signature\nsort V; rel E(V,V);")).unwrap()
    else {
        panic!()
    };
    assert_eq!(s.sorts().len(), 1);
    assert_eq!(s.relation(&Sym::new("E")).unwrap().len(), 2);
}

#[test]
fn linear_order_theory_is_h_inductive() {
    let Parsed::Theory(t) = parse(&doc(T_LO)).unwrap() else {
        panic!()
    };
    assert_eq!(t.kind, TheoryKind::HInductive);
    assert_eq!(t.sentences.len(), 3);
}

#[test]
fn path_structure() {
    let src = "#poslog v1 structure
signature Graph { sort V; rel E(V,V); }
structure P2 over Graph { V = {a,b,c}; E = {(a,b),(b,a),(b,c),(c,b)}; }";
    let Parsed::Structure(m) = parse(&doc(src)).unwrap() else {
        panic!()
    };
    assert_eq!(m.total_size(), 3);
    assert_eq!(m.relation(&Sym::new("E")).unwrap().tuples().len(), 4);
}

#[test]
fn round_trip_theory() {
    let v = parse(&doc(T_LO)).unwrap();
    let s = serialize(&v);
    assert_eq!(parse(&doc(&s)).unwrap(), v);
    assert_eq!(serialize(&parse(&doc(&s)).unwrap()), s);
}

#[test]
fn truth_prints_as_keyword() {
    assert_eq!(print_formula(&Signature::new(""), &Formula::True), "true");
}

#[test]
fn disjunction_prints_bracketed() {
    let mut sig = Signature::new("");
    sig.add_sort("V").unwrap();
    sig.add_relation("E", &["V", "V"]).unwrap();
    let f = parse_formula(&sig, "E(x,y) | x=y").unwrap();
    assert_eq!(print_formula(&sig, &f), "Or[x=y, E(x, y)]");
}

#[test]
fn free_variables_in_axiom_are_positioned() {
    let src = "#poslog v1 theory\nsort V; rel E(V,V);\ntheory T {\n  axiom E(x,y);\n}\n";
    let Err(Error::Parse(ds)) = parse(&doc(src)) else {
        panic!()
    };
    assert_eq!((ds[0].line, ds[0].column), (4, 3));
}

#[test]
fn undeclared_relation_reported() {
    let src = "#poslog v1 theory\nsort V;\ntheory T { axiom forall x: R(x); }\n";
    let Err(Error::Parse(ds)) = parse(&doc(src)) else {
        panic!()
    };
    assert_eq!(ds[0].line, 3);
    assert_eq!(ds[0].column, 28);
}

#[test]
fn inferred_signature_for_bare_formula() {
    let (sig, f) = parse_formula_inferring("forall x: E(x,x) -> false").unwrap();
    assert!(sig.relation(&Sym::new("E")).is_some());
    assert!(f.is_sentence());
}

#[test]
fn multi_sorted_round_trip() {
    let src = "#poslog v1 formula
signature S { sort P, L; rel I(P, L); }
forall x:P: exists x:L: I(x:P, x:L);";
    let v = parse(&doc(src)).unwrap();
    let s = serialize(&v);
    assert_eq!(parse(&doc(&s)).unwrap(), v);
}
