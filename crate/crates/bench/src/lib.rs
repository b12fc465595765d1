//! Fixtures shared by the benchmarks.

use poslog::{corpus, Limits, UniverseClass, Var};

/// A shipped class and its `(x, y)` tuple.
pub fn fixture(file: &str) -> (UniverseClass, Vec<Var>) {
    let c = corpus::class(file).expect("shipped class");
    let s = c
        .signature
        .default_sort()
        .expect("one sort")
        .as_str()
        .to_string();
    let vars = vec![Var::new(s.as_str(), 0), Var::new(s.as_str(), 1)];
    (c, vars)
}

pub fn limits() -> Limits {
    Limits::default()
}
