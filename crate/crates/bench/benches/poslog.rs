use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use poslog::forcing::{back_and_forth, is_generic, ForcingContext};
use poslog::geometric::dnf;
use poslog::morley::{depth_fragment, expand, morleyize, reduct_check};
use poslog::types::{pmc_check, type_space};
use poslog::{corpus, enumerate_positive, Var};
use poslog_bench::{fixture, limits};

fn enumeration(c: &mut Criterion) {
    let (cl, vars) = fixture("graphs4.pls");
    c.bench_function("enumerate positive (x,y) d=2", |b| {
        b.iter(|| enumerate_positive(black_box(&cl.signature), &vars, 2, limits()).unwrap())
    });
    let fs = enumerate_positive(&cl.signature, &vars, 2, limits()).unwrap();
    c.bench_function("dnf of every positive (x,y) d=2", |b| {
        b.iter(|| {
            fs.iter()
                .map(|f| dnf(f, limits()).unwrap().disjuncts.len())
                .sum::<usize>()
        })
    });
}

fn spaces(c: &mut Criterion) {
    let (cl, vars) = fixture("graphs4.pls");
    c.bench_function("type space graphs4 d=1", |b| {
        b.iter(|| type_space(black_box(&cl), &vars, 1, limits()).unwrap())
    });
    let (ch, cvars) = fixture("chains3.pls");
    c.bench_function("pmc chains3 d=1", |b| {
        b.iter(|| pmc_check(black_box(&ch), &cvars, 1, limits()).unwrap())
    });
}

fn morley(c: &mut Criterion) {
    let t = corpus::theory("t_graph.plt").unwrap();
    let (cl, _) = fixture("graphs3.pls");
    let f = depth_fragment(&t, &[Var::new("V", 0)], 2, limits()).unwrap();
    c.bench_function("morleyize graph depth-2 fragment", |b| {
        b.iter(|| morleyize(black_box(&t), &f).unwrap())
    });
    let mt = morleyize(&t, &f).unwrap();
    let k3 = cl.member("K3").unwrap();
    c.bench_function("expand and reduct-check K3", |b| {
        b.iter(|| {
            reduct_check(&mt, &expand(&mt, black_box(k3)).unwrap())
                .unwrap()
                .passed()
        })
    });
}

fn forcing(c: &mut Criterion) {
    let (cl, vars) = fixture("graphs3.pls");
    let ctx = ForcingContext::new(&cl, &vars, 1, limits()).unwrap();
    c.bench_function("generic K3 d=1", |b| {
        b.iter(|| is_generic(black_box("K3"), &ctx).unwrap().generic)
    });
    let (g4, _) = fixture("graphs4.pls");
    let (a, bb) = (g4.member("G4_4").unwrap(), g4.member("G4_5").unwrap());
    c.bench_function("back-and-forth G4_4 G4_5 d=0", |b| {
        b.iter(|| {
            back_and_forth(black_box(a), bb, 0, limits())
                .unwrap()
                .equivalent()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = enumeration, spaces, morley, forcing
}
criterion_main!(benches);
