//! The shipped corpus: three theories and their classes of small models, up
//! to isomorphism.
//!
//! The class files are generated by [`generate`] and checked against it in
//! tests; setting `POSLOG_REGEN=1` while running those tests rewrites them.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logic::{Signature, Theory};
use crate::semantics::{FiniteStructure, UniverseClass};
use crate::text::{parse, serialize, Parsed, SourceDocument};

pub const T_GRAPH: &str = include_str!("../corpus/t_graph.plt");
pub const T_LO: &str = include_str!("../corpus/t_lo.plt");
pub const T_UNARY: &str = include_str!("../corpus/t_unary.plt");
pub const GRAPHS3: &str = include_str!("../corpus/graphs3.pls");
pub const GRAPHS4: &str = include_str!("../corpus/graphs4.pls");
pub const CHAINS3: &str = include_str!("../corpus/chains3.pls");
pub const UNARY3: &str = include_str!("../corpus/unary3.pls");

/// File name and text of every shipped document.
pub const FILES: [(&str, &str); 7] = [
    ("t_graph.plt", T_GRAPH),
    ("t_lo.plt", T_LO),
    ("t_unary.plt", T_UNARY),
    ("graphs3.pls", GRAPHS3),
    ("graphs4.pls", GRAPHS4),
    ("chains3.pls", CHAINS3),
    ("unary3.pls", UNARY3),
];

/// Theory file paired with each class file.
pub const PAIRS: [(&str, &str); 4] = [
    ("t_graph.plt", "graphs3.pls"),
    ("t_graph.plt", "graphs4.pls"),
    ("t_lo.plt", "chains3.pls"),
    ("t_unary.plt", "unary3.pls"),
];

/// Geometric types in `(x, y)` shipped for the complement checks, by class
/// file.
pub const GEOMETRIC_TYPES: [(&str, &str); 14] = [
    ("graphs3.pls", "GType[E(x, y)]"),
    ("graphs3.pls", "GType[Or[x=y, E(x, y)]]"),
    ("graphs3.pls", "GType[exists z: And[E(x, z), E(y, z)]]"),
    ("graphs4.pls", "GType[x=y]"),
    ("graphs4.pls", "GType[exists z: E(x, z)]"),
    (
        "graphs4.pls",
        "GType[E(x, y), exists z: And[E(x, z), E(y, z)]]",
    ),
    (
        "graphs4.pls",
        "GType[Or[E(x, y), exists z: And[E(x, z), E(z, y)]]]",
    ),
    ("chains3.pls", "GType[x<y]"),
    ("chains3.pls", "GType[Or[x=y, x<y]]"),
    ("chains3.pls", "GType[exists z: And[x<z, z<y]]"),
    ("chains3.pls", "GType[exists z: x<z, exists z: z<y]"),
    ("unary3.pls", "GType[P(x)]"),
    ("unary3.pls", "GType[Or[P(x), P(y)]]"),
    ("unary3.pls", "GType[x=y, exists z: P(z)]"),
];

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn text(file: &str) -> Result<&'static str> {
    FILES
        .iter()
        .find(|(n, _)| *n == file)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Undeclared(format!("corpus file `{file}`")))
}

pub fn theory(file: &str) -> Result<Arc<Theory>> {
    match parse(&SourceDocument::from_text(text(file)?)?)? {
        Parsed::Theory(t) => Ok(t),
        _ => Err(Error::Precondition(format!("`{file}` is not a theory"))),
    }
}

/// A shipped class with no theory attached.
pub fn bare_class(file: &str) -> Result<UniverseClass> {
    match parse(&SourceDocument::from_text(text(file)?)?)? {
        Parsed::Class(c) => Ok(c),
        _ => Err(Error::Precondition(format!("`{file}` is not a class"))),
    }
}

/// A shipped class with its theory attached.
pub fn class(file: &str) -> Result<UniverseClass> {
    let (t, _) = PAIRS
        .iter()
        .find(|(_, c)| *c == file)
        .ok_or_else(|| Error::Undeclared(format!("corpus class `{file}`")))?;
    bare_class(file)?.with_theory(theory(t)?)
}

/// Every shipped class, theory attached, in [`PAIRS`] order.
pub fn classes() -> Result<Vec<UniverseClass>> {
    PAIRS.iter().map(|(_, c)| class(c)).collect()
}

pub fn graph_signature() -> Arc<Signature> {
    let mut s = Signature::new("Graph");
    s.add_sort("V").unwrap();
    s.add_relation("E", &["V", "V"]).unwrap();
    Arc::new(s)
}

pub fn order_signature() -> Arc<Signature> {
    let mut s = Signature::new("Order");
    s.add_sort("V").unwrap();
    s.add_relation("<", &["V", "V"]).unwrap();
    Arc::new(s)
}

pub fn unary_signature() -> Arc<Signature> {
    let mut s = Signature::new("Unary");
    s.add_sort("V").unwrap();
    s.add_relation("P", &["V"]).unwrap();
    Arc::new(s)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Least relabelling of a tuple set under all permutations of `0..n`.
fn canonical_form(n: usize, tuples: &BTreeSet<Vec<usize>>) -> Vec<Vec<usize>> {
    permutations(n)
        .into_iter()
        .map(|p| {
            let mut ts: Vec<Vec<usize>> = tuples
                .iter()
                .map(|t| t.iter().map(|&e| p[e]).collect())
                .collect();
            ts.sort();
            ts
        })
        .min()
        .unwrap_or_default()
}

fn structure(
    name: &str,
    sig: &Arc<Signature>,
    n: usize,
    rel: &str,
    tuples: &[Vec<usize>],
) -> FiniteStructure {
    let ts: Vec<&[usize]> = tuples.iter().map(|t| t.as_slice()).collect();
    FiniteStructure::relational(name, sig.clone(), &NAMES[..n], &[(rel, &ts)])
        .expect("generated structure is well-formed")
}

/// Irreflexive symmetric graphs on `1..=max` vertices up to isomorphism.
/// Complete graphs are named `K<n>`, edgeless ones `N<n>`, the rest
/// `G<n>_<i>` in order of edge count.
pub fn graphs(max: usize) -> Vec<FiniteStructure> {
    let sig = graph_signature();
    let mut out = Vec::new();
    for n in 1..=max {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut seen = BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let mut ts = BTreeSet::new();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    ts.insert(vec![i, j]);
                    ts.insert(vec![j, i]);
                }
            }
            seen.insert((ts.len(), canonical_form(n, &ts)));
        }
        let mut other = 0;
        for (m, ts) in seen {
            let name = if m == n * (n - 1) {
                format!("K{n}")
            } else if m == 0 {
                format!("N{n}")
            } else {
                other += 1;
                format!("G{n}_{other}")
            };
            out.push(structure(&name, &sig, n, "E", &ts));
        }
    }
    out
}

/// Every binary relation `E` on `1..=max` vertices up to isomorphism, loops
/// allowed, named `D<n>_<i>` in canonical order.
pub fn digraphs(max: usize) -> Vec<FiniteStructure> {
    let sig = graph_signature();
    let mut out = Vec::new();
    for n in 1..=max {
        let cells: Vec<Vec<usize>> = (0..n)
            .flat_map(|i| (0..n).map(move |j| vec![i, j]))
            .collect();
        let mut seen = BTreeSet::new();
        for mask in 0u64..(1 << cells.len()) {
            let ts: BTreeSet<Vec<usize>> = (0..cells.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| cells[k].clone())
                .collect();
            seen.insert(canonical_form(n, &ts));
        }
        for (i, ts) in seen.into_iter().enumerate() {
            out.push(structure(&format!("D{n}_{i}"), &sig, n, "E", &ts));
        }
    }
    out
}

/// Strict chains `C1 .. C<max>`.
pub fn chains(max: usize) -> Vec<FiniteStructure> {
    let sig = order_signature();
    (1..=max)
        .map(|n| {
            let ts: Vec<Vec<usize>> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
                .collect();
            structure(&format!("C{n}"), &sig, n, "<", &ts)
        })
        .collect()
}

/// Sets of size `1..=max` with `k` marked elements, named `U<n>_<k>`.
pub fn unary(max: usize) -> Vec<FiniteStructure> {
    let sig = unary_signature();
    (1..=max)
        .flat_map(|n| {
            let sig = sig.clone();
            (0..=n).map(move |k| {
                let ts: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
                structure(&format!("U{n}_{k}"), &sig, n, "P", &ts)
            })
        })
        .collect()
}

/// The generated text of each shipped class file.
pub fn generate() -> Vec<(&'static str, String)> {
    let mk = |name: &str, sig: Arc<Signature>, ms: Vec<FiniteStructure>| {
        let c = UniverseClass::new(name, sig, ms, None).expect("generated class is well-formed");
        serialize(&Parsed::Class(c))
    };
    vec![
        ("graphs3.pls", mk("graphs3", graph_signature(), graphs(3))),
        ("graphs4.pls", mk("graphs4", graph_signature(), graphs(4))),
        ("chains3.pls", mk("chains3", order_signature(), chains(3))),
        ("unary3.pls", mk("unary3", unary_signature(), unary(3))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::is_isomorphic;

    #[test]
    fn shipped_classes_match_generator() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
        let regen = std::env::var("POSLOG_REGEN").is_ok_and(|v| v == "1");
        for (file, want) in generate() {
            if regen {
                std::fs::write(dir.join(file), &want).unwrap();
            } else {
                assert_eq!(text(file).unwrap(), want, "{file} is stale");
            }
        }
    }

    #[test]
    fn classes_load_against_their_theories() {
        let cs = classes().unwrap();
        let pec: Vec<Vec<&str>> = cs
            .iter()
            .map(|c| c.pec_members().iter().map(|m| m.name.as_str()).collect())
            .collect();
        assert_eq!(pec, [vec!["K3"], vec!["K4"], vec!["C3"], vec!["U1_1"]]);
    }

    #[test]
    fn class_sizes() {
        assert_eq!(graphs(3).len(), 7);
        assert_eq!(graphs(4).len(), 18);
        assert_eq!(chains(3).len(), 3);
        assert_eq!(unary(3).len(), 9);
    }

    #[test]
    fn digraph_counts_match_the_known_sequence() {
        // Relations up to isomorphism: 2, 10, 104 on 1, 2, 3 points.
        let ds = digraphs(3);
        let by_size = |n| ds.iter().filter(|d| d.total_size() == n).count();
        assert_eq!([by_size(1), by_size(2), by_size(3)], [2, 10, 104]);
    }

    #[test]
    fn generated_graphs_pairwise_non_isomorphic() {
        let gs = graphs(4);
        for (i, a) in gs.iter().enumerate() {
            for b in &gs[i + 1..] {
                assert!(!is_isomorphic(a, b).unwrap(), "{} ~ {}", a.name, b.name);
            }
        }
    }
}
