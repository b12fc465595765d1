//! Acceptance criteria, one line each. Run with `cargo test -p poslog-cli --test acceptance`.
//!
//! Every criterion is exact (zero tolerance). Criteria listed in
//! `KNOWN_FAILURES` are expected to fail on the shipped corpus; they still
//! run as stated and print FAIL. Any other failure makes the target fail.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use poslog::forcing::{back_and_forth, is_generic, pecte_check, stability_check, ForcingContext};
use poslog::geometric::{dnf, geo_complement, typgeo_check, GeometricType};
use poslog::logic::classify::is_geometric;
use poslog::morley::{
    depth_fragment, expand, functor_suite, morleyize, reduct_check, MorleyizedTheory,
};
use poslog::semantics::{eval_at, is_isomorphic, FiniteStructure};
use poslog::text::parse_formula;
use poslog::types::{
    hausdorff_witness, pmc_check, spectral_complement_cover, type_space, BoundedTypeSpace,
    CaseReport, ConstructibleResolver, CoverStatus,
};
use poslog::{
    corpus, depth, enumerate_constructible, enumerate_positive, Connective, Formula, Limits,
    UniverseClass, Var,
};

/// Criteria that fail faithfully on the shipped corpus: finite chains are
/// not positively model complete relative to their class.
const KNOWN_FAILURES: [u32; 4] = [2, 4, 5, 7];

const DNF_BUDGET: Duration = Duration::from_secs(60);
const SPECTRAL_BUDGET: Duration = Duration::from_secs(30);
/// Geometric formulas in one variable up to this depth, and in two
/// variables one level lower.
const DNF_DEPTH: usize = 3;
const FORCING_DEPTH: usize = 2;
const CONSTRUCTIBLE_DEPTH: usize = 2;
const MORLEY_DEPTH: usize = 2;

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn sort_vars(c: &UniverseClass, n: u32) -> Vec<Var> {
    let s = c.signature.default_sort().unwrap().as_str();
    (0..n).map(|i| Var::new(s, i)).collect()
}

fn limits() -> Limits {
    Limits::default()
}

/// Evaluates `f` and its normal form at every tuple of every structure.
fn dnf_agrees(
    fs: &[Formula],
    vars: &[Var],
    structures: &[FiniteStructure],
) -> (usize, Vec<String>) {
    let sorts: Vec<_> = vars.iter().map(|v| v.sort.clone()).collect();
    let (mut checked, mut bad) = (0, Vec::new());
    for f in fs {
        let n = dnf(f, limits()).unwrap().to_formula();
        for m in structures {
            for t in m.tuples(&sorts) {
                checked += 1;
                if eval_at(m, f, vars, &t) != eval_at(m, &n, vars, &t) {
                    bad.push(format!("{f} in {} at {t:?}", m.name));
                }
            }
        }
    }
    (checked, bad)
}

fn c1_dnf() -> Verdict {
    let start = Instant::now();
    let sig = corpus::graph_signature();
    let c = corpus::class("graphs4.pls").unwrap();
    let mut structures = corpus::digraphs(3);
    structures.extend(corpus::graphs(4));
    let mut checked = 0;
    let mut bad = Vec::new();
    for (n, d) in [(1, DNF_DEPTH), (2, DNF_DEPTH - 1)] {
        let vars = sort_vars(&c, n);
        let fs: Vec<Formula> = enumerate_positive(&sig, &vars, d, limits()).unwrap();
        assert!(fs.iter().all(is_geometric));
        let (k, b) = dnf_agrees(&fs, &vars, &structures);
        checked += k;
        bad.extend(b);
    }
    let t = start.elapsed();
    verdict(
        bad.is_empty() && t <= DNF_BUDGET,
        format!(
            "{checked} evaluations over {} structures, {} disagreements, {:.1}s",
            structures.len(),
            bad.len(),
            t.as_secs_f64()
        ),
    )
}

fn chains_space(d: usize) -> BoundedTypeSpace {
    let c = corpus::class("chains3.pls").unwrap();
    let vars = sort_vars(&c, 2);
    type_space(&c, &vars, d, limits()).unwrap()
}

fn c2_spectral() -> Verdict {
    let start = Instant::now();
    let sp = chains_space(1);
    let (mut exact, mut uncovered, mut excess) = (0, Vec::new(), 0);
    for phi in sp.supply.formulas() {
        let r = spectral_complement_cover(&sp, phi).unwrap();
        if !r.excess.is_empty() {
            excess += 1;
        }
        match r.status {
            CoverStatus::Covered if r.excess.is_empty() => exact += 1,
            _ => uncovered.push(phi.to_string()),
        }
    }
    let t = start.elapsed();
    verdict(
        uncovered.is_empty() && t <= SPECTRAL_BUDGET,
        format!(
            "{exact}/{} complements exactly covered, {excess} with excess, uncovered: {}; {:.1}s",
            sp.supply.len(),
            if uncovered.is_empty() {
                "none".to_string()
            } else {
                uncovered.join("; ")
            },
            t.as_secs_f64()
        ),
    )
}

fn all_spaces() -> Vec<(String, BoundedTypeSpace)> {
    let mut out = Vec::new();
    for c in corpus::classes().unwrap() {
        for (n, dmax) in [(1, 2), (2, 2)] {
            for d in 0..=dmax {
                let vars = sort_vars(&c, n);
                out.push((
                    format!("{} {n}v d={d}", c.name),
                    type_space(&c, &vars, d, limits()).unwrap(),
                ));
            }
        }
    }
    out
}

fn c3_hausdorff(spaces: &[(String, BoundedTypeSpace)]) -> Verdict {
    let (mut pairs, mut bad) = (0, Vec::new());
    for (name, sp) in spaces {
        for i in 0..sp.len() {
            for j in 0..sp.len() {
                if i == j {
                    continue;
                }
                pairs += 1;
                let (p, q) = (&sp.types[i], &sp.types[j]);
                let w = hausdorff_witness(p, q).unwrap();
                let (inp, inq) = (p.contains(&w.formula), q.contains(&w.formula));
                if inp == inq || w.in_first != inp {
                    bad.push(format!("{name}: {i},{j}"));
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{pairs} ordered pairs in {} spaces, {} without witness",
            spaces.len(),
            bad.len()
        ),
    )
}

fn c4_pmc() -> Verdict {
    let sp = chains_space(1);
    let c = &sp.class;
    let p = pmc_check(c, sp.vars(), 1, limits()).unwrap();
    let sig = &c.signature;
    let f = |s: &str| parse_formula(sig, s).unwrap();
    // Oracle: for each phi, search the supply for psi with [psi] the
    // complement of [phi] and phi & psi realized in no member.
    let vars = sp.vars().to_vec();
    let sorts: Vec<_> = vars.iter().map(|v| v.sort.clone()).collect();
    let joint_free = |a: &Formula, b: &Formula| {
        c.members.iter().all(|m| {
            m.tuples(&sorts)
                .iter()
                .all(|t| !(eval_at(m, a, &vars, t) && eval_at(m, b, &vars, t)))
        })
    };
    let mut mismatches = 0;
    for phi in sp.supply.formulas() {
        let comp = sp.complement(&sp.basic_set(phi));
        let found = sp
            .supply
            .formulas()
            .iter()
            .any(|psi| sp.basic_set(psi) == comp && joint_free(phi, psi));
        let assigned = p.assignment.iter().find(|(a, _)| a == phi);
        let ok = match assigned {
            Some((_, psi)) => found && sp.basic_set(psi) == comp && joint_free(phi, psi),
            None => !found && p.failures.contains(phi),
        };
        if !ok {
            mismatches += 1;
        }
    }
    let golden = (f("x<y"), f("x=y | y<x"));
    let has_golden = p.assignment.contains(&golden);
    verdict(
        p.is_total() && has_golden && mismatches == 0,
        format!(
            "{} assigned, {} without complement, x<y -> Or[x=y, y<x] {}, {mismatches} oracle mismatches",
            p.assignment.len(),
            p.failures.len(),
            if has_golden { "present" } else { "absent" }
        ),
    )
}

fn case_exact(c: &CaseReport) -> bool {
    c.cover.excess.is_empty()
        && matches!(c.cover.status, CoverStatus::Covered)
        && c.children.iter().all(case_exact)
}

fn c5_constructible() -> Verdict {
    let (mut total, mut first_pass, mut fixed) = (0, 0, 0);
    let mut persistent = Vec::new();
    for c in corpus::classes().unwrap() {
        let vars = sort_vars(&c, 1);
        let sp = type_space(&c, &vars, CONSTRUCTIBLE_DEPTH, limits()).unwrap();
        let chis =
            enumerate_constructible(&c.signature, &vars, CONSTRUCTIBLE_DEPTH, limits()).unwrap();
        let rs: Vec<ConstructibleResolver> = (0..=CONSTRUCTIBLE_DEPTH + 1)
            .map(|d| ConstructibleResolver::new(&sp, d, limits()).unwrap())
            .collect();
        for chi in &chis {
            total += 1;
            let d = depth(chi);
            let exact = |d: usize| {
                let r = rs[d].resultant(chi).unwrap();
                r.cover.excess.is_empty() && r.cover.covered() && case_exact(&r.case)
            };
            if exact(d) {
                first_pass += 1;
            } else if exact(d + 1) {
                fixed += 1;
            } else {
                persistent.push(format!("{}: {chi}", c.name));
            }
        }
    }
    verdict(
        persistent.is_empty(),
        format!(
            "{total} formulas, {first_pass} exact at their depth, {fixed} after raising d, still uncovered: {}",
            if persistent.is_empty() { "none".to_string() } else { persistent.join("; ") }
        ),
    )
}

fn c6_typgeo(spaces: &[(String, BoundedTypeSpace)]) -> Verdict {
    let (mut bad, mut non_max) = (Vec::new(), 0);
    for (name, sp) in spaces {
        let r = typgeo_check(sp, limits()).unwrap();
        if !(r.injective() && r.surjective()) {
            bad.push(name.clone());
        }
        non_max += r.non_maximal.len();
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} spaces, {} failing bijection; separately, {non_max} images not maximal",
            spaces.len(),
            bad.len()
        ),
    )
}

fn c7_geocomp() -> Verdict {
    let (mut exact, mut bad) = (0, Vec::new());
    for (file, text) in corpus::GEOMETRIC_TYPES {
        let c = corpus::class(file).unwrap();
        let vars = sort_vars(&c, 2);
        let sp = type_space(&c, &vars, 1, limits()).unwrap();
        let g = GeometricType::parse(&c.signature, &vars, text).unwrap();
        let r = geo_complement(&g, &sp, limits()).unwrap();
        if r.exact() {
            exact += 1;
        } else {
            let (o, u): (usize, usize) = r.checks.iter().fold((0, 0), |(o, u), ch| {
                (o + ch.overlap.len(), u + ch.uncovered.len())
            });
            bad.push(format!("{file} {text}: {o} overlapping, {u} uncovered"));
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{exact}/{} shipped types exact; failing: {}",
            corpus::GEOMETRIC_TYPES.len(),
            if bad.is_empty() {
                "none".to_string()
            } else {
                bad.join("; ")
            }
        ),
    )
}

fn morleyized() -> Vec<(UniverseClass, MorleyizedTheory)> {
    corpus::PAIRS
        .iter()
        .map(|(t, c)| {
            let th = corpus::theory(t).unwrap();
            let cl = corpus::class(c).unwrap();
            let x = sort_vars(&cl, 1);
            let f = depth_fragment(&th, &x, MORLEY_DEPTH, limits()).unwrap();
            let mt = morleyize(&th, &f).unwrap();
            (cl, mt)
        })
        .collect()
}

/// Adds the least missing tuple to, or removes the least present tuple from,
/// one relation table.
fn mutate(
    e: &FiniteStructure,
    mt: &MorleyizedTheory,
    i: usize,
    enlarge: bool,
) -> Option<FiniteStructure> {
    let f = &mt.fragment;
    let r = f.symbol(i);
    let sorts: Vec<_> = f.free_tuple(i).iter().map(|v| v.sort.clone()).collect();
    let mut ts: BTreeSet<Vec<usize>> = e.relation(&r).unwrap().tuples().clone();
    if enlarge {
        let t = e.tuples(&sorts).into_iter().find(|t| !ts.contains(t))?;
        ts.insert(t);
    } else {
        let t = ts.iter().next()?.clone();
        ts.remove(&t);
    }
    Some(e.with_relation(&r, ts).unwrap())
}

fn c8_morley(mts: &[(UniverseClass, MorleyizedTheory)]) -> Verdict {
    let (mut models, mut round_trips, mut mutations, mut caught) = (0, 0, 0, 0);
    for (c, mt) in mts {
        for m in &c.members {
            models += 1;
            let e = expand(mt, m).unwrap();
            if reduct_check(mt, &e).unwrap().passed() {
                round_trips += 1;
            }
        }
        // Every relation of the pec members, both directions.
        for m in c.pec_members() {
            let e = expand(mt, m).unwrap();
            for i in 0..mt.fragment.len() {
                for enlarge in [true, false] {
                    if let Some(bad) = mutate(&e, mt, i, enlarge) {
                        mutations += 1;
                        if !reduct_check(mt, &bad).unwrap().passed() {
                            caught += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(
        round_trips == models && caught == mutations,
        format!("{round_trips}/{models} round trips, {caught}/{mutations} mutations caught"),
    )
}

fn c9_functor(mts: &[(UniverseClass, MorleyizedTheory)]) -> Verdict {
    let (mut maps, mut homs, mut bad) = (0, 0, 0);
    for (c, mt) in mts {
        let r = functor_suite(mt, &c.members).unwrap();
        maps += r.maps;
        homs += r.homomorphisms;
        bad += r.disagreements.len();
    }
    verdict(
        bad == 0,
        format!("{maps} sorted maps, {homs} L^G-homomorphisms, {bad} disagreements"),
    )
}

fn c10_forcing() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for file in ["graphs3.pls", "graphs4.pls"] {
        let c = corpus::class(file).unwrap();
        let ctx = ForcingContext::new(&c, &sort_vars(&c, 2), FORCING_DEPTH, limits()).unwrap();
        let (mut agree, mut pecte, mut exists_fail) = (0, 0, 0);
        for (m, pec) in c.members.iter().zip(c.pec_flags()) {
            let e = ctx.existential(&m.name).unwrap();
            let g = is_generic(&m.name, &ctx).unwrap();
            if e.existential == g.generic {
                agree += 1;
            } else {
                pass = false;
            }
            if e.existential {
                for k in [Connective::Atomic, Connective::And, Connective::Not] {
                    pass &= g.tally(k).passed();
                }
                exists_fail += g.tally(Connective::Exists).failed;
            }
            if *pec {
                let h = pecte_check(&m.name, &ctx).unwrap().holds();
                pass &= h;
                pecte += usize::from(h);
            }
        }
        let stable = stability_check(&ctx).unwrap().holds();
        pass &= stable;
        notes.push(format!(
            "{}: {agree}/{} agree, pecte {pecte}/{}, stable {stable}, exists failures {exists_fail}",
            c.name,
            c.members.len(),
            c.pec_members().len()
        ));
    }
    verdict(pass, notes.join("; "))
}

fn c11_karp() -> Verdict {
    let mut all: Vec<FiniteStructure> = Vec::new();
    for c in corpus::classes().unwrap() {
        for m in c.members {
            if m.total_size() <= 4
                && !all
                    .iter()
                    .any(|a| a.signature == m.signature && a.name == m.name)
            {
                all.push(m);
            }
        }
    }
    let (mut pairs, mut bad) = (0, 0);
    for a in &all {
        for b in all.iter().filter(|b| b.signature == a.signature) {
            pairs += 1;
            let eq = back_and_forth(a, b, 0, limits()).unwrap().equivalent();
            if eq != is_isomorphic(a, b).unwrap() {
                bad += 1;
            }
        }
    }
    verdict(
        bad == 0,
        format!(
            "{pairs} pairs over {} structures, {bad} disagreements",
            all.len()
        ),
    )
}

fn c12_determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_poslog"))
            .arg("check-suite")
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && a.status == b.status;
    verdict(
        same && a.status.success(),
        format!(
            "{} bytes, identical {same}, exit {:?}",
            a.stdout.len(),
            a.status.code()
        ),
    )
}

fn main() {
    let spaces = all_spaces();
    let mts = morleyized();
    let criteria: Vec<Criterion> = vec![
        (1, "dnf soundness", Box::new(c1_dnf)),
        (2, "spectral complement on chains", Box::new(c2_spectral)),
        (
            3,
            "hausdorff separation",
            Box::new(|| c3_hausdorff(&spaces)),
        ),
        (4, "positive model completeness on chains", Box::new(c4_pmc)),
        (
            5,
            "constructible resultant induction",
            Box::new(c5_constructible),
        ),
        (6, "star map bijection", Box::new(|| c6_typgeo(&spaces))),
        (7, "geometric complement", Box::new(c7_geocomp)),
        (8, "morleyisation round trip", Box::new(|| c8_morley(&mts))),
        (9, "functor correspondence", Box::new(|| c9_functor(&mts))),
        (10, "forcing and genericity", Box::new(c10_forcing)),
        (11, "karp check", Box::new(c11_karp)),
        (12, "determinism", Box::new(c12_determinism)),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in &criteria {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(n);
        let tag = match (v.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {n:>2} {tag}: {name} [{secs:.1}s]: {}", v.detail);
        if !v.pass && !known {
            unexpected.push(*n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
