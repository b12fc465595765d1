//! One function per subcommand, each producing a [`Report`].

use serde_json::{json, Value};

use poslog::forcing::{
    back_and_forth, forces, is_generic, BackAndForthFailure, Direction, Element, ForcingContext,
};
use poslog::geometric::dnf;
use poslog::morley::{expand, morleyize, reduct_check, Clause, MorleyizedTheory, ReductReport};
use poslog::semantics::is_pec;
use poslog::text::print_formula;
use poslog::types::{
    pmc_check, resultant, spectral_complement_cover, type_space, BoundedTypeSpace, CoverStatus,
};
use poslog::{classify, Connective, FiniteStructure, Formula, FragmentVerdict, Signature, Var};

use crate::args::{ForcingCommand, RunConfig};
use crate::load;
use crate::report::Report;
use crate::CliError;

fn show(sig: &Signature, f: &Formula) -> String {
    print_formula(sig, f)
}

fn show_all(sig: &Signature, fs: &[Formula]) -> Vec<Value> {
    fs.iter().map(|f| json!(show(sig, f))).collect()
}

fn tuple_names(m: &FiniteStructure, vars: &[Var], t: &[usize]) -> Vec<String> {
    vars.iter()
        .zip(t)
        .map(|(v, &e)| m.element_name(&v.sort, e).to_string())
        .collect()
}

fn var_names(vars: &[Var]) -> String {
    vars.iter().map(Var::name).collect::<Vec<_>>().join(", ")
}

/// The most specific label, for the headline.
fn headline(v: &FragmentVerdict) -> &'static str {
    let order = [
        (v.h_universal_basic, "h-universal-basic"),
        (v.normal_geometric, "normal-geometric"),
        (v.positive, "positive"),
        (v.h_inductive_basic, "h-inductive-basic"),
        (v.g_inductive_basic, "g-inductive-basic"),
        (v.constructible, "constructible"),
    ];
    order
        .iter()
        .find(|(b, _)| *b)
        .map_or("first-order", |(_, n)| n)
}

pub fn classify_cmd(cfg: &RunConfig, text: &str) -> Result<Report, CliError> {
    let (sig, f) = load::formula(cfg, text)?;
    let v = classify(&sig, &f)?;
    let mut r = Report::new("classify");
    r.line(headline(&v));
    r.line(format!("fragments: {}", v.labels().join(", ")));
    r.field("formula", show(&sig, &f));
    r.field("headline", headline(&v));
    r.field("fragments", v.labels());
    Ok(r)
}

pub fn dnf_cmd(cfg: &RunConfig, text: &str) -> Result<Report, CliError> {
    let (sig, f) = load::formula(cfg, text)?;
    let n = dnf(&f, load::limits(cfg))?;
    let disjuncts: Vec<Formula> = n.disjuncts.iter().cloned().collect();
    let mut r = Report::new("dnf");
    r.line(show(&sig, &n.to_formula()));
    r.line(format!("{} disjuncts", disjuncts.len()));
    for d in &disjuncts {
        r.line(format!("  {}", show(&sig, d)));
    }
    r.field("formula", show(&sig, &f));
    r.field("normal_form", show(&sig, &n.to_formula()));
    r.field("disjuncts", show_all(&sig, &disjuncts));
    Ok(r)
}

fn space(cfg: &RunConfig) -> Result<BoundedTypeSpace, CliError> {
    let c = load::require_class(cfg)?;
    let vars = load::vars(cfg, &c.signature)?;
    Ok(type_space(&c, &vars, cfg.depth, load::limits(cfg))?)
}

pub fn typespace_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let sp = space(cfg)?;
    let sig = sp.class.signature.clone();
    let mut r = Report::new("typespace");
    r.line(format!(
        "class {} in ({}) at depth {}: {} types over {} formulas",
        sp.class.name,
        var_names(sp.vars()),
        sp.depth(),
        sp.len(),
        sp.supply.len()
    ));
    let mut types = Vec::new();
    for (k, p) in sp.types.iter().enumerate() {
        let real = &p.realizations[0];
        let m = sp.structure(real);
        let names = tuple_names(m, sp.vars(), &real.tuple);
        let atomic: Vec<Formula> = p
            .formulas
            .iter()
            .filter(|f| f.is_atomic())
            .cloned()
            .collect();
        let shown: Vec<String> = atomic.iter().map(|f| show(&sig, f)).collect();
        r.line(format!(
            "p{k} {}({}) {} formulas; atomic: {}",
            real.structure,
            names.join(", "),
            p.formulas.len(),
            if shown.is_empty() {
                "none".to_string()
            } else {
                shown.join(", ")
            }
        ));
        let all: Vec<Formula> = p.formulas.iter().cloned().collect();
        types.push(json!({
            "index": k,
            "structure": real.structure,
            "tuple": names,
            "realizations": p.realizations.len(),
            "formulas": show_all(&sig, &all),
        }));
    }
    r.field("class", sp.class.name.clone());
    r.field("vars", sp.vars().iter().map(Var::name).collect::<Vec<_>>());
    r.field("depth", sp.depth());
    r.field("types", types);
    r.set_dot(sp.to_dot());
    Ok(r)
}

pub fn resultant_cmd(cfg: &RunConfig, text: &str) -> Result<Report, CliError> {
    let sp = space(cfg)?;
    let sig = sp.class.signature.clone();
    let phi = poslog::text::parse_formula(&sig, text)?;
    let res = resultant(&sp.class, &phi, sp.vars(), sp.depth(), load::limits(cfg))?;
    let cover = spectral_complement_cover(&sp, &phi)?;
    let mut r = Report::new("resultant");
    r.line(format!(
        "resultant of {} at depth {}: {} formulas",
        show(&sig, &res.phi),
        res.depth,
        res.members.len()
    ));
    for f in &res.members {
        r.line(format!("  {}", show(&sig, f)));
    }
    let status = match &cover.status {
        CoverStatus::Covered => "covered".to_string(),
        CoverStatus::UncoveredAtDepth(ts) => format!("uncovered at depth: {ts:?}"),
    };
    r.line(format!(
        "complement {:?}; cover {:?}; {status}",
        cover.complement, cover.cover
    ));
    if !cover.covered() {
        r.fail();
    }
    r.field("formula", show(&sig, &res.phi));
    r.field("members", show_all(&sig, &res.members));
    r.field("complement", cover.complement.clone());
    r.field("cover", cover.cover.clone());
    r.field("covered", cover.covered());
    Ok(r)
}

pub fn pmc_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let c = load::require_class(cfg)?;
    let vars = load::vars(cfg, &c.signature)?;
    let p = pmc_check(&c, &vars, cfg.depth, load::limits(cfg))?;
    let sig = &c.signature;
    let mut r = Report::new("pmc");
    r.line(format!(
        "complement assignment in ({}) at depth {}: {} assigned, {} without complement",
        var_names(&vars),
        p.depth,
        p.assignment.len(),
        p.failures.len()
    ));
    let mut table = Vec::new();
    for (phi, psi) in &p.assignment {
        r.line(format!("  {} ↦ {}", show(sig, phi), show(sig, psi)));
        table.push(json!([show(sig, phi), show(sig, psi)]));
    }
    for phi in &p.failures {
        r.line(format!("  {} ↦ none", show(sig, phi)));
    }
    if !p.is_total() {
        r.fail();
    }
    r.field("total", p.is_total());
    r.field("assignment", table);
    r.field("failures", show_all(sig, &p.failures));
    Ok(r)
}

pub fn pec_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let c = load::require_class(cfg)?;
    let mut r = Report::new("pec");
    let mut rows = Vec::new();
    for m in &c.members {
        let v = is_pec(m, &c)?;
        let mut row = json!({"member": m.name, "pec": v.pec});
        match &v.counterexample {
            None => r.line(format!("{}: pec", m.name)),
            Some(ce) => {
                let mut s = format!(
                    "{}: not pec; the map into {} is not an immersion",
                    m.name, ce.target
                );
                if let Some(w) = &ce.witness {
                    let f = show(&c.signature, &w.formula);
                    s.push_str(&format!("; witness {f}"));
                    row["witness"] = json!(f);
                }
                row["target"] = json!(ce.target);
                r.line(s);
            }
        }
        rows.push(row);
    }
    r.field("class", c.name.clone());
    r.field("members", rows);
    Ok(r)
}

fn morleyized(cfg: &RunConfig) -> Result<MorleyizedTheory, CliError> {
    let t = load::require_theory(cfg)?;
    let f = load::fragment(cfg, &t)?;
    Ok(morleyize(&t, &f)?)
}

pub fn morleyize_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let mt = morleyized(cfg)?;
    let plt = mt.to_plt();
    let mut r = Report::new("morleyize");
    for l in plt.lines() {
        r.line(l);
    }
    let counts: serde_json::Map<String, Value> = Clause::ALL
        .iter()
        .map(|c| (c.label().to_string(), json!(mt.clause(*c).count())))
        .collect();
    r.field("theory", mt.name());
    r.field("fragment_size", mt.fragment.len());
    r.field("axioms", mt.axioms.len());
    r.field("axioms_by_clause", Value::Object(counts));
    r.field("plt", plt);
    Ok(r)
}

fn connective_label(c: Connective) -> &'static str {
    c.label()
}

fn reduct_lines(r: &mut Report, mt: &MorleyizedTheory, n: &FiniteStructure, rep: &ReductReport) {
    let sig = &mt.signature;
    r.line(format!(
        "{}: {} axioms checked, {} violated; {} pointwise checks, {} violated; {} theory sentences violated",
        n.name,
        rep.axioms_checked,
        rep.axiom_violations.len(),
        rep.pointwise_checked,
        rep.pointwise_violations.len(),
        rep.theory_violations.len()
    ));
    let f = &mt.fragment;
    let mut av = Vec::new();
    for v in &rep.axiom_violations {
        let s = show(sig, &v.sentence);
        r.line(format!(
            "  clause ({}) {} at {:?}: {s}",
            v.clause.label(),
            f.symbol(v.member),
            v.tuple
        ));
        av.push(json!({"clause": v.clause.label(), "relation": f.symbol(v.member).to_string(), "tuple": v.tuple, "axiom": s}));
    }
    let mut pv = Vec::new();
    for v in &rep.pointwise_violations {
        let phi = show(&f.signature, f.get(v.member));
        r.line(format!(
            "  {} case {} at {:?}: relation {}, formula {} ({phi})",
            f.symbol(v.member),
            connective_label(v.case),
            v.tuple,
            v.relation,
            v.formula
        ));
        pv.push(json!({"relation": f.symbol(v.member).to_string(), "case": connective_label(v.case), "tuple": v.tuple, "formula": phi, "holds": v.relation, "satisfied": v.formula}));
    }
    for s in &rep.theory_violations {
        r.line(format!(
            "  theory sentence fails: {}",
            show(&f.signature, s)
        ));
    }
    r.field("axiom_violations", av);
    r.field("pointwise_violations", pv);
    r.field(
        "theory_violations",
        show_all(&f.signature, &rep.theory_violations),
    );
    r.field("axioms_checked", rep.axioms_checked);
    r.field("pointwise_checked", rep.pointwise_checked);
}

pub fn verify_morley_cmd(cfg: &RunConfig, arg: &str) -> Result<Report, CliError> {
    let mt = morleyized(cfg)?;
    let s = load::structure(cfg, arg)?;
    let is_base = s.signature.relations().len() == mt.fragment.signature.relations().len();
    let n = if is_base { expand(&mt, &s)? } else { s };
    let rep = reduct_check(&mt, &n)?;
    let mut r = Report::new("verify-morley");
    r.field("structure", n.name.clone());
    r.field("expanded", is_base);
    reduct_lines(&mut r, &mt, &n, &rep);
    if !rep.passed() {
        r.fail();
    }
    Ok(r)
}

fn forcing_context(cfg: &RunConfig) -> Result<ForcingContext, CliError> {
    let c = load::require_class(cfg)?;
    let vars = load::vars(cfg, &c.signature)?;
    let ctx = ForcingContext::new(&c, &vars, cfg.depth, load::limits(cfg))?;
    Ok(match &cfg.existential_member {
        Some(m) => ctx.with_existential(m),
        None => ctx,
    })
}

fn member<'a>(ctx: &'a ForcingContext, name: &str) -> Result<&'a FiniteStructure, CliError> {
    ctx.class()
        .member(name)
        .ok_or_else(|| CliError::Usage(format!("`{name}` is not a member of the class")))
}

pub fn forcing_cmd(cfg: &RunConfig, cmd: &ForcingCommand) -> Result<Report, CliError> {
    match cmd {
        ForcingCommand::Karp { left, right } => karp_cmd(cfg, left, right),
        ForcingCommand::Check {
            member: name,
            formula,
            tuple,
        } => {
            let ctx = forcing_context(cfg)?;
            let m = member(&ctx, name)?;
            let sig = ctx.class().signature.clone();
            let f = poslog::text::parse_formula(&sig, formula)?;
            let names: Vec<&str> = tuple
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            if names.len() != ctx.vars().len() {
                return Err(CliError::Usage(format!(
                    "--tuple names {} elements for {} variables",
                    names.len(),
                    ctx.vars().len()
                )));
            }
            let mut t = Vec::new();
            for (v, n) in ctx.vars().iter().zip(&names) {
                t.push(m.element_index(&v.sort, n).ok_or_else(|| {
                    CliError::Usage(format!(
                        "`{n}` is not an element of sort {} in `{}`",
                        v.sort, m.name
                    ))
                })?);
            }
            let yes = forces(m, &f, &t, &ctx)?;
            let mut r = Report::new("forcing check");
            r.line(format!(
                "{} {} {} at ({})",
                m.name,
                if yes { "forces" } else { "does not force" },
                show(&sig, &f),
                names.join(", ")
            ));
            r.field("member", m.name.clone());
            r.field("formula", show(&sig, &f));
            r.field(
                "tuple",
                names.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            );
            r.field("forces", yes);
            Ok(r)
        }
        ForcingCommand::Generic { member: name } => {
            let ctx = forcing_context(cfg)?;
            member(&ctx, name)?;
            let g = is_generic(name, &ctx)?;
            let sig = ctx.class().signature.clone();
            let mut r = Report::new("forcing generic");
            r.line(format!(
                "{} is {}generic at depth {}",
                g.member,
                if g.generic { "" } else { "not " },
                g.depth
            ));
            let mut tallies = serde_json::Map::new();
            for (c, t) in &g.by_connective {
                r.line(format!(
                    "  {}: {} checked, {} failed",
                    c.label(),
                    t.checked,
                    t.failed
                ));
                tallies.insert(
                    c.label().to_string(),
                    json!({"checked": t.checked, "failed": t.failed}),
                );
            }
            if let Some(f) = &g.first_failure {
                let m = member(&ctx, name)?;
                let names = tuple_names(m, ctx.vars(), &f.tuple);
                r.line(format!(
                    "  first failure: {} at ({}): satisfied {}, forced {}",
                    show(&sig, &f.formula),
                    names.join(", "),
                    f.satisfied,
                    f.forced
                ));
                r.field(
                    "first_failure",
                    json!({"formula": show(&sig, &f.formula), "tuple": names, "satisfied": f.satisfied, "forced": f.forced}),
                );
                r.fail();
            }
            r.field("member", g.member.clone());
            r.field("depth", g.depth);
            r.field("generic", g.generic);
            r.field("by_connective", Value::Object(tallies));
            Ok(r)
        }
        ForcingCommand::Existential { member: name } => {
            let ctx = forcing_context(cfg)?;
            member(&ctx, name)?;
            let e = ctx.existential(name)?;
            let sig = ctx.class().signature.clone();
            let mut r = Report::new("forcing existential");
            r.line(format!(
                "{} is {}existential at depth {} with {} parameters (pec: {})",
                e.member,
                if e.existential { "" } else { "not " },
                e.depth,
                e.params,
                e.pec
            ));
            if let Some(ce) = &e.counterexample {
                let m = member(&ctx, name)?;
                let target = ctx
                    .class()
                    .member(&ce.continuation.target)
                    .expect("continuation target");
                let pi: Vec<String> = ce.pi.iter().map(|f| show(&sig, f)).collect();
                let params = tuple_names(m, &ce.vars[1..], &ce.params);
                let realizer = target
                    .element_name(&ce.vars[0].sort, ce.realizer)
                    .to_string();
                r.line(format!(
                    "  unrealized over ({}) = ({}): {} ; realized by {} = {} in {}",
                    var_names(&ce.vars[1..]),
                    params.join(", "),
                    pi.join(", "),
                    ce.vars[0].name(),
                    realizer,
                    target.name
                ));
                r.field(
                    "counterexample",
                    json!({"vars": ce.vars.iter().map(Var::name).collect::<Vec<_>>(), "pi": pi, "params": params, "target": target.name, "realizer": realizer}),
                );
                r.fail();
            }
            r.field("member", e.member.clone());
            r.field("depth", e.depth);
            r.field("existential", e.existential);
            r.field("pec", e.pec);
            Ok(r)
        }
    }
}

fn element_names(m: &FiniteStructure, t: &[Element]) -> Vec<String> {
    t.iter()
        .map(|(s, e)| m.element_name(s, *e).to_string())
        .collect()
}

pub fn karp_cmd(cfg: &RunConfig, left: &str, right: &str) -> Result<Report, CliError> {
    let (m, n) = (load::structure(cfg, left)?, load::structure(cfg, right)?);
    let out = back_and_forth(&m, &n, cfg.depth, load::limits(cfg))?;
    let mut r = Report::new("karp");
    r.field("left", m.name.clone());
    r.field("right", n.name.clone());
    r.field("depth", cfg.depth);
    r.field("equivalent", out.equivalent());
    r.field("pairs", out.system.pairs.len());
    match &out.failure {
        None => r.line(format!(
            "{} and {} are back-and-forth equivalent at depth {} ({} pairs)",
            m.name,
            n.name,
            cfg.depth,
            out.system.pairs.len()
        )),
        Some(BackAndForthFailure {
            left,
            right,
            direction,
            element,
        }) => {
            let (l, rr) = (element_names(&m, left), element_names(&n, right));
            let what = match (direction, element) {
                (Direction::Root, _) | (_, None) => "the empty pair is not type-equal".to_string(),
                (Direction::Forth, Some((s, e))) => {
                    format!("{} in {} has no partner", m.element_name(s, *e), m.name)
                }
                (Direction::Back, Some((s, e))) => {
                    format!("{} in {} has no partner", n.element_name(s, *e), n.name)
                }
            };
            r.line(format!(
                "{} and {} are not equivalent at depth {}: at ({}) / ({}), {what}",
                m.name,
                n.name,
                cfg.depth,
                l.join(", "),
                rr.join(", ")
            ));
            r.field("failure", json!({"left": l, "right": rr, "direction": format!("{direction:?}").to_lowercase(), "reason": what}));
            r.fail();
        }
    }
    Ok(r)
}
