//! DOT rendering of the specialization order of basic sets.

use std::collections::BTreeMap;
use std::fmt::Write;

use fixedbitset::FixedBitSet;

use super::{by_depth, BoundedTypeSpace};
use crate::text::print_formula;

impl BoundedTypeSpace {
    /// Distinct basic sets, each with its least formula by depth then
    /// canonical order, ordered by size and then by members.
    pub fn basic_sets(&self) -> Vec<(FixedBitSet, usize)> {
        let mut seen: BTreeMap<(usize, Vec<usize>), (FixedBitSet, usize)> = BTreeMap::new();
        for i in by_depth(&self.supply) {
            let s = self.basic_set_at(i);
            let key = (s.count_ones(..), s.ones().collect());
            seen.entry(key).or_insert((s, i));
        }
        seen.into_values().collect()
    }

    /// Hasse diagram of inclusion between basic sets, smaller sets pointing
    /// to the least sets strictly containing them.
    pub fn to_dot(&self) -> String {
        let sets = self.basic_sets();
        let sig = &self.class.signature;
        let mut out = String::from("digraph basic_sets {\n  rankdir=BT;\n  node [shape=box];\n");
        for (k, (s, i)) in sets.iter().enumerate() {
            let members: Vec<String> = s.ones().map(|t| format!("p{t}")).collect();
            let label = format!(
                "{} {{{}}}",
                print_formula(sig, self.supply.get(*i)),
                members.join(",")
            );
            let _ = writeln!(out, "  n{k} [label={:?}];", label);
        }
        let strict = |a: &FixedBitSet, b: &FixedBitSet| a.is_subset(b) && a != b;
        for (i, (a, _)) in sets.iter().enumerate() {
            for (j, (b, _)) in sets.iter().enumerate() {
                let covers =
                    strict(a, b) && !sets.iter().any(|(c, _)| strict(a, c) && strict(c, b));
                if covers {
                    let _ = writeln!(out, "  n{i} -> n{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
