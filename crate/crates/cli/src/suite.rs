//! The `check-suite` command: invariant suites over the shipped corpus.
//!
//! A suite fails only on a broken invariant. Bounded phenomena that the
//! corpus exhibits by design, such as uncovered complements on chains, are
//! reported as notes. Output carries no timings, so identical runs give
//! identical bytes.

use serde_json::{json, Value};

use poslog::forcing::{back_and_forth, is_generic, pecte_check, stability_check, ForcingContext};
use poslog::geometric::{dnf, geo_complement, typgeo_check, GeometricType};
use poslog::logic::classify_unchecked;
use poslog::morley::{depth_fragment, expand, functor_suite, morleyize, reduct_check};
use poslog::semantics::{eval_at, is_isomorphic};
use poslog::text::{parse, parse_formula, print_formula, serialize, Parsed, SourceDocument};
use poslog::types::{
    hausdorff_witness, pmc_check, spectral_complement_cover, type_space, CoverStatus,
};
use poslog::{corpus, enumerate_first_order, enumerate_positive, Limits, UniverseClass, Var};

use crate::args::RunConfig;
use crate::report::Report;
use crate::CliError;

struct Suite {
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
    checked: usize,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            failures: Vec::new(),
            notes: Vec::new(),
            checked: 0,
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn pair_vars(c: &UniverseClass) -> Vec<Var> {
    let s = c
        .signature
        .default_sort()
        .expect("corpus signatures have one sort")
        .as_str();
    vec![Var::new(s, 0), Var::new(s, 1)]
}

fn text_suite() -> Result<Suite, CliError> {
    let mut s = Suite::new("text");
    for (name, text) in corpus::FILES {
        let first = parse(&SourceDocument::from_text(text)?)?;
        let printed = serialize(&first);
        let again = parse(&SourceDocument::from_text(&printed)?)?;
        s.expect(serialize(&again) == printed, || {
            format!("{name}: printing is not idempotent")
        });
        let same = match (&first, &again) {
            (Parsed::Theory(a), Parsed::Theory(b)) => a == b,
            (Parsed::Class(a), Parsed::Class(b)) => a.members == b.members,
            _ => false,
        };
        s.expect(same, || format!("{name}: reparse differs"));
    }
    for (_, file) in corpus::PAIRS {
        let c = corpus::class(file)?;
        let vars = pair_vars(&c);
        for f in enumerate_first_order(&c.signature, &vars, 1, Limits::default())? {
            let back = parse_formula(&c.signature, &print_formula(&c.signature, &f))?;
            s.expect(back == f, || format!("{file}: `{f}` does not round-trip"));
        }
    }
    Ok(s)
}

fn dnf_suite(limits: Limits) -> Result<Suite, CliError> {
    let mut s = Suite::new("dnf");
    let c = corpus::class("graphs4.pls")?;
    let vars = pair_vars(&c);
    let sorts = vec![vars[0].sort.clone(), vars[1].sort.clone()];
    for f in enumerate_positive(&c.signature, &vars, 1, limits)? {
        let n = dnf(&f, limits)?.to_formula();
        for m in &c.members {
            for t in m.tuples(&sorts) {
                let (a, b) = (eval_at(m, &f, &vars, &t), eval_at(m, &n, &vars, &t));
                s.expect(a == b, || format!("`{f}` in {} at {t:?}", m.name));
            }
        }
    }
    Ok(s)
}

fn spaces_suite(limits: Limits) -> Result<Vec<Suite>, CliError> {
    let (mut haus, mut cover, mut pmc, mut typgeo) = (
        Suite::new("hausdorff"),
        Suite::new("cover"),
        Suite::new("pmc"),
        Suite::new("typgeo"),
    );
    for (_, file) in corpus::PAIRS {
        let c = corpus::class(file)?;
        let vars = pair_vars(&c);
        for d in 0..=1 {
            let sp = type_space(&c, &vars, d, limits)?;
            for i in 0..sp.len() {
                for j in i + 1..sp.len() {
                    let (p, q) = (&sp.types[i], &sp.types[j]);
                    let w = hausdorff_witness(p, q)?;
                    let ok = p.contains(&w.formula) != q.contains(&w.formula)
                        && w.in_first == p.contains(&w.formula);
                    haus.expect(ok, || format!("{file} d={d}: types {i}, {j}"));
                }
            }
        }
        let sp = type_space(&c, &vars, 1, limits)?;
        let mut uncovered = 0;
        for phi in sp.supply.formulas() {
            let r = spectral_complement_cover(&sp, phi)?;
            cover.expect(r.excess.is_empty(), || {
                format!("{file}: cover of `{phi}` meets it")
            });
            if matches!(r.status, CoverStatus::UncoveredAtDepth(_)) {
                uncovered += 1;
            }
        }
        if uncovered > 0 {
            cover.note(format!(
                "{file} d=1: {uncovered} of {} complements uncovered",
                sp.supply.len()
            ));
        }
        let p = pmc_check(&c, &vars, 1, limits)?;
        pmc.checked += p.assignment.len() + p.failures.len();
        if !p.is_total() {
            pmc.note(format!(
                "{file} d=1: {} formulas without complement",
                p.failures.len()
            ));
        }
        let t = typgeo_check(&sp, limits)?;
        typgeo.expect(t.injective(), || {
            format!("{file}: star map collisions {:?}", t.collisions)
        });
        typgeo.expect(t.surjective(), || {
            format!("{file}: {} maximal types unreached", t.unreached.len())
        });
        if !t.lands_in_maximal() {
            typgeo.note(format!(
                "{file}: {} images not maximal",
                t.non_maximal.len()
            ));
        }
    }
    Ok(vec![haus, cover, pmc, typgeo])
}

fn geocomp_suite(limits: Limits) -> Result<Suite, CliError> {
    let mut s = Suite::new("geo-complement");
    for (file, text) in corpus::GEOMETRIC_TYPES {
        let c = corpus::class(file)?;
        let vars = pair_vars(&c);
        let sp = type_space(&c, &vars, 1, limits)?;
        let g = GeometricType::parse(&c.signature, &vars, text)?;
        let r = geo_complement(&g, &sp, limits)?;
        for ch in &r.checks {
            s.expect(ch.overlap.is_empty(), || {
                format!("{file} {text}: overlap in {}", ch.member)
            });
            if !ch.uncovered.is_empty() {
                s.note(format!(
                    "{file} {text}: {} tuples of {} uncovered",
                    ch.uncovered.len(),
                    ch.member
                ));
            }
        }
    }
    Ok(s)
}

fn morley_suite(limits: Limits) -> Result<Suite, CliError> {
    let mut s = Suite::new("morley");
    for (tfile, cfile) in corpus::PAIRS {
        let t = corpus::theory(tfile)?;
        let c = corpus::class(cfile)?;
        let x = vec![pair_vars(&c)[0].clone()];
        let f = depth_fragment(&t, &x, 1, limits)?;
        let mt = morleyize(&t, &f)?;
        let reparsed = match parse(&SourceDocument::from_text(&mt.to_plt())?)? {
            Parsed::Theory(th) => *th == mt.theory()?,
            _ => false,
        };
        s.expect(reparsed, || {
            format!("{cfile}: the emitted theory does not reparse")
        });
        s.expect(
            mt.axioms
                .iter()
                .all(|a| classify_unchecked(&a.sentence()).g_inductive_basic),
            || format!("{cfile}: an axiom is not g-inductive"),
        );
        let sizes = mt.signature.relations().len() == t.signature.relations().len() + f.len();
        s.expect(sizes, || format!("{cfile}: signature size"));
        for m in &c.members {
            let rep = reduct_check(&mt, &expand(&mt, m)?)?;
            s.expect(rep.passed(), || {
                format!("{cfile}: round trip fails on {}", m.name)
            });
        }
        let fs = functor_suite(&mt, &c.members)?;
        s.checked += fs.maps;
        if !fs.agrees() {
            s.failures
                .push(format!("{cfile}: {} maps disagree", fs.disagreements.len()));
        }
    }
    Ok(s)
}

fn forcing_suite(limits: Limits) -> Result<Suite, CliError> {
    let mut s = Suite::new("forcing");
    let c = corpus::class("graphs3.pls")?;
    let ctx = ForcingContext::new(&c, &pair_vars(&c), 2, limits)?;
    for (m, pec) in c.members.iter().zip(c.pec_flags()) {
        let e = ctx.existential(&m.name)?;
        let g = is_generic(&m.name, &ctx)?;
        s.expect(e.existential == g.generic, || {
            format!(
                "{}: existential {} generic {}",
                m.name, e.existential, g.generic
            )
        });
        if *pec {
            s.expect(pecte_check(&m.name, &ctx)?.holds(), || {
                format!("{}: forcing is not total", m.name)
            });
        }
    }
    s.expect(stability_check(&ctx)?.holds(), || {
        "forcing is not stable along homomorphisms".into()
    });
    Ok(s)
}

fn karp_suite(limits: Limits) -> Result<Suite, CliError> {
    let mut s = Suite::new("karp");
    let c = corpus::class("graphs4.pls")?;
    for m in &c.members {
        for n in &c.members {
            let eq = back_and_forth(m, n, 0, limits)?.equivalent();
            let iso = is_isomorphic(m, n)?;
            s.expect(eq == iso, || {
                format!(
                    "{} / {}: back-and-forth {eq}, isomorphic {iso}",
                    m.name, n.name
                )
            });
        }
    }
    Ok(s)
}

pub fn check_suite(cfg: &RunConfig) -> Result<Report, CliError> {
    let limits = crate::load::limits(cfg);
    let mut suites = vec![text_suite()?, dnf_suite(limits)?];
    suites.extend(spaces_suite(limits)?);
    suites.push(geocomp_suite(limits)?);
    suites.push(morley_suite(limits)?);
    suites.push(forcing_suite(limits)?);
    suites.push(karp_suite(limits)?);

    let mut r = Report::new("check-suite");
    let mut rows = Vec::new();
    for s in &suites {
        let status = if s.failures.is_empty() {
            "pass"
        } else {
            "FAIL"
        };
        r.line(format!("{}: {status} ({} checks)", s.name, s.checked));
        for f in &s.failures {
            r.line(format!("  failure: {f}"));
        }
        for n in &s.notes {
            r.line(format!("  note: {n}"));
        }
        if !s.failures.is_empty() {
            r.fail();
        }
        rows.push(json!({
            "suite": s.name,
            "status": if s.failures.is_empty() { "pass" } else { "fail" },
            "checks": s.checked,
            "failures": s.failures,
            "notes": s.notes,
        }));
    }
    r.field("suites", Value::Array(rows));
    Ok(r)
}
