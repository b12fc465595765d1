use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::logic::{Signature, Sym};

/// Relation table: dense membership bits plus the sorted tuple list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelTable {
    radix: Vec<usize>,
    bits: FixedBitSet,
    tuples: BTreeSet<Vec<usize>>,
}

fn flat(radix: &[usize], tuple: &[usize]) -> usize {
    tuple.iter().zip(radix).fold(0, |acc, (&e, &r)| acc * r + e)
}

impl RelTable {
    fn new(radix: Vec<usize>, tuples: BTreeSet<Vec<usize>>) -> Self {
        let len = radix.iter().product::<usize>();
        let mut bits = FixedBitSet::with_capacity(len);
        for t in &tuples {
            bits.insert(flat(&radix, t));
        }
        RelTable {
            radix,
            bits,
            tuples,
        }
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.bits.contains(flat(&self.radix, tuple))
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<usize>> {
        &self.tuples
    }
}

/// Total function table indexed by argument tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunTable {
    radix: Vec<usize>,
    values: Vec<usize>,
}

impl FunTable {
    pub fn apply(&self, args: &[usize]) -> usize {
        self.values[flat(&self.radix, args)]
    }
}

/// A finite many-sorted structure. Elements of each sort are the indices
/// `0..n` into that sort's carrier, which also records their names.
///
/// Every carrier is nonempty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteStructure {
    pub name: String,
    pub signature: Arc<Signature>,
    carriers: BTreeMap<Sym, Vec<String>>,
    relations: BTreeMap<Sym, RelTable>,
    functions: BTreeMap<Sym, FunTable>,
    constants: BTreeMap<Sym, usize>,
}

/// Every tuple over the given per-position sizes, in lexicographic order.
pub fn all_tuples(radix: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &r in radix {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

impl FiniteStructure {
    /// Builds and validates a structure. Relations absent from `relations`
    /// are empty; every function and constant must be given in full.
    pub fn build(
        name: &str,
        signature: Arc<Signature>,
        carriers: BTreeMap<Sym, Vec<String>>,
        relations: BTreeMap<Sym, BTreeSet<Vec<usize>>>,
        functions: BTreeMap<Sym, BTreeMap<Vec<usize>, usize>>,
        constants: BTreeMap<Sym, usize>,
    ) -> Result<Self> {
        let bad = |m: String| Error::Precondition(format!("structure `{name}`: {m}"));
        for s in signature.sorts() {
            match carriers.get(s) {
                None => return Err(bad(format!("no carrier for sort `{s}`"))),
                Some(c) if c.is_empty() => {
                    return Err(bad(format!("empty carrier for sort `{s}`")))
                }
                Some(c) => {
                    let uniq: BTreeSet<&String> = c.iter().collect();
                    if uniq.len() != c.len() {
                        return Err(bad(format!("duplicate element in sort `{s}`")));
                    }
                }
            }
        }
        if let Some(s) = carriers.keys().find(|s| !signature.sorts().contains(*s)) {
            return Err(Error::Undeclared(s.to_string()));
        }
        let size = |s: &Sym| carriers[s].len();
        let mut rels = BTreeMap::new();
        for (r, sorting) in signature.relations() {
            let radix: Vec<usize> = sorting.iter().map(size).collect();
            let tuples = relations.get(r).cloned().unwrap_or_default();
            for t in &tuples {
                if t.len() != radix.len() || t.iter().zip(&radix).any(|(e, n)| e >= n) {
                    return Err(bad(format!("tuple {t:?} out of range for `{r}`")));
                }
            }
            rels.insert(r.clone(), RelTable::new(radix, tuples));
        }
        if let Some(r) = relations
            .keys()
            .find(|r| !signature.relations().contains_key(*r))
        {
            return Err(Error::Undeclared(r.to_string()));
        }
        let mut funs = BTreeMap::new();
        for (f, (arity, result)) in signature.functions() {
            let radix: Vec<usize> = arity.iter().map(size).collect();
            let table = functions
                .get(f)
                .ok_or_else(|| bad(format!("no table for function `{f}`")))?;
            let mut values = Vec::new();
            for t in all_tuples(&radix) {
                let v = *table
                    .get(&t)
                    .ok_or_else(|| bad(format!("function `{f}` undefined at {t:?}")))?;
                if v >= size(result) {
                    return Err(bad(format!("function `{f}` value out of range")));
                }
                values.push(v);
            }
            funs.insert(f.clone(), FunTable { radix, values });
        }
        for (c, s) in signature.constants() {
            match constants.get(c) {
                Some(&v) if v < size(s) => {}
                _ => return Err(bad(format!("constant `{c}` missing or out of range"))),
            }
        }
        Ok(FiniteStructure {
            name: name.to_string(),
            signature,
            carriers,
            relations: rels,
            functions: funs,
            constants,
        })
    }

    /// Single-sorted relational structure from named relation tuples.
    pub fn relational(
        name: &str,
        signature: Arc<Signature>,
        elements: &[&str],
        relations: &[(&str, &[&[usize]])],
    ) -> Result<Self> {
        let sort = signature
            .default_sort()
            .cloned()
            .ok_or_else(|| Error::Precondition("signature is not single-sorted".into()))?;
        let carriers = [(sort, elements.iter().map(|s| s.to_string()).collect())]
            .into_iter()
            .collect();
        let rels = relations
            .iter()
            .map(|(r, ts)| (Sym::new(r), ts.iter().map(|t| t.to_vec()).collect()))
            .collect();
        Self::build(
            name,
            signature,
            carriers,
            rels,
            BTreeMap::new(),
            BTreeMap::new(),
        )
    }

    pub fn carriers(&self) -> &BTreeMap<Sym, Vec<String>> {
        &self.carriers
    }

    pub fn carrier(&self, sort: &Sym) -> &[String] {
        self.carriers.get(sort).map_or(&[], |v| v.as_slice())
    }

    pub fn size(&self, sort: &Sym) -> usize {
        self.carrier(sort).len()
    }

    /// Total number of elements over all sorts.
    pub fn total_size(&self) -> usize {
        self.carriers.values().map(|c| c.len()).sum()
    }

    pub fn element_name(&self, sort: &Sym, e: usize) -> &str {
        &self.carriers[sort][e]
    }

    pub fn element_index(&self, sort: &Sym, name: &str) -> Option<usize> {
        self.carriers.get(sort)?.iter().position(|n| n == name)
    }

    pub fn holds(&self, rel: &Sym, tuple: &[usize]) -> bool {
        self.relations.get(rel).is_some_and(|t| t.contains(tuple))
    }

    pub fn relation(&self, rel: &Sym) -> Option<&RelTable> {
        self.relations.get(rel)
    }

    pub fn apply(&self, fun: &Sym, args: &[usize]) -> usize {
        self.functions[fun].apply(args)
    }

    pub fn function_table(&self, fun: &Sym) -> BTreeMap<Vec<usize>, usize> {
        let t = &self.functions[fun];
        all_tuples(&t.radix)
            .into_iter()
            .map(|a| {
                let v = t.apply(&a);
                (a, v)
            })
            .collect()
    }

    pub fn constant(&self, c: &Sym) -> usize {
        self.constants[c]
    }

    pub fn constants(&self) -> &BTreeMap<Sym, usize> {
        &self.constants
    }

    /// Every tuple of elements with the given sorting, lexicographically.
    pub fn tuples(&self, sorting: &[Sym]) -> Vec<Vec<usize>> {
        let radix: Vec<usize> = sorting.iter().map(|s| self.size(s)).collect();
        all_tuples(&radix)
    }

    /// Copy with the same interpretations over another signature naming;
    /// used to re-home a structure onto an equal signature.
    pub fn with_signature(&self, signature: Arc<Signature>) -> Self {
        let mut s = self.clone();
        s.signature = signature;
        s
    }

    /// Copy with relation `rel` replaced.
    pub fn with_relation(&self, rel: &Sym, tuples: BTreeSet<Vec<usize>>) -> Result<Self> {
        let mut rels: BTreeMap<Sym, BTreeSet<Vec<usize>>> = self
            .relations
            .iter()
            .map(|(r, t)| (r.clone(), t.tuples.clone()))
            .collect();
        rels.insert(rel.clone(), tuples);
        self.rebuild(&self.name, self.signature.clone(), rels)
    }

    /// Rebuilds with new relation content over a (possibly larger) signature,
    /// keeping carriers, functions and constants.
    pub fn rebuild(
        &self,
        name: &str,
        signature: Arc<Signature>,
        relations: BTreeMap<Sym, BTreeSet<Vec<usize>>>,
    ) -> Result<Self> {
        let funs = self
            .functions
            .keys()
            .map(|f| (f.clone(), self.function_table(f)))
            .collect();
        Self::build(
            name,
            signature,
            self.carriers.clone(),
            relations,
            funs,
            self.constants.clone(),
        )
    }

    /// Restriction to the symbols of a smaller signature.
    pub fn reduct(&self, signature: Arc<Signature>) -> Result<Self> {
        let rels = signature
            .relations()
            .keys()
            .map(|r| {
                let t = self
                    .relations
                    .get(r)
                    .map(|t| t.tuples.clone())
                    .ok_or_else(|| Error::Undeclared(r.to_string()))?;
                Ok((r.clone(), t))
            })
            .collect::<Result<_>>()?;
        let funs = signature
            .functions()
            .keys()
            .map(|f| (f.clone(), self.function_table(f)))
            .collect();
        let consts = signature
            .constants()
            .keys()
            .map(|c| (c.clone(), self.constant(c)))
            .collect();
        Self::build(
            &self.name,
            signature,
            self.carriers.clone(),
            rels,
            funs,
            consts,
        )
    }
}
