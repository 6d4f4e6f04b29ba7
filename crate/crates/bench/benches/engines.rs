use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use restrule::deduction::{complete_theory_of, saturate};
use restrule::glp::{check_modal_proof, gl_transitivity_proof};
use restrule::structures::pd;
use restrule_bench::{chain, named_chain, thetas, universe};

fn model_checking(c: &mut Criterion) {
    let u = universe(3);
    let mut g = c.benchmark_group("eval");
    for n in [2, 4] {
        let a = chain(n);
        g.bench_with_input(BenchmarkId::new("depth3_universe", n), &a, |b, a| {
            b.iter(|| u.iter().filter(|s| a.eval_sentence(s).unwrap()).count())
        });
    }
    g.finish();
}

fn definable_part(c: &mut Criterion) {
    let mut g = c.benchmark_group("pd");
    for n in [3, 4, 6] {
        let a = chain(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| pd(black_box(a)))
        });
    }
    g.finish();
}

fn completeness(c: &mut Criterion) {
    let a = chain(4);
    let th = thetas(&a);
    let mut g = c.benchmark_group("complete_theory");
    g.sample_size(10);
    for depth in [2, 3] {
        let u = universe(depth);
        g.bench_with_input(BenchmarkId::new("chain4", depth), u.sentences(), |b, s| {
            b.iter(|| {
                complete_theory_of(&a, &th, s, None)
                    .unwrap()
                    .decisions
                    .len()
            })
        });
    }
    g.finish();
}

fn saturation(c: &mut Criterion) {
    let mut g = c.benchmark_group("saturate");
    g.sample_size(10);
    for n in [2, 3] {
        let (t, sys, u) = named_chain(n);
        g.bench_function(BenchmarkId::new("s_rule_fixpoint", n), |b| {
            b.iter(|| saturate(&t, &u, &sys, None).len())
        });
    }
    g.finish();
}

fn modal(c: &mut Criterion) {
    let p = gl_transitivity_proof();
    c.bench_function("glp/check_gl_transitivity", |b| {
        b.iter(|| check_modal_proof(black_box(&p), 3).is_ok())
    });
}

criterion_group!(
    benches,
    model_checking,
    definable_part,
    completeness,
    saturation,
    modal
);
criterion_main!(benches);
