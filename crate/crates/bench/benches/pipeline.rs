use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use food_core::fuzz::{gen_program, honest, run_properties_with, GenConfig, Limits, Property};
use food_core::{corpus, desugar, eval, parse, preprocess, pretty, transform, typecheck};

fn all_types(src: &str) -> (food_core::Program, BTreeSet<String>) {
    let p = desugar(&parse(src).unwrap());
    let s = p.type_names().into_iter().collect();
    (p, s)
}

fn front_end(c: &mut Criterion) {
    let text = corpus::BOOL_OOP_CTX;
    c.bench_function("parse normalizer", |b| b.iter(|| parse(black_box(text)).unwrap()));
    let (p, _) = all_types(text);
    c.bench_function("pretty normalizer", |b| b.iter(|| pretty(black_box(&p)).unwrap()));
    c.bench_function("preprocess normalizer", |b| {
        b.iter(|| preprocess(black_box(&p)).unwrap())
    });
    c.bench_function("typecheck normalizer", |b| b.iter(|| typecheck(black_box(&p)).unwrap()));
}

fn transformation(c: &mut Criterion) {
    for (name, src) in [("sets", corpus::SETS_OOP), ("normalizer", corpus::BOOL_OOP_CTX)] {
        let (p, s) = all_types(src);
        c.bench_function(&format!("transform {name}"), |b| {
            b.iter(|| transform(black_box(&p), &s).unwrap())
        });
    }
}

fn evaluation(c: &mut Criterion) {
    for (name, src) in [
        ("normalizer objects", corpus::BOOL_OOP_CTX),
        ("normalizer data", corpus::BOOL_FP_CTX),
    ] {
        let (p, _) = all_types(src);
        c.bench_function(&format!("eval {name}"), |b| {
            b.iter(|| eval(black_box(&p), 100_000).unwrap())
        });
    }
}

fn fuzzing(c: &mut Criterion) {
    let mut seed = 0u64;
    c.bench_function("generate program", |b| {
        b.iter_batched(
            || {
                seed += 1;
                GenConfig::with_seed(seed)
            },
            |cfg| gen_program(&cfg),
            BatchSize::SmallInput,
        )
    });
    let mut g = c.benchmark_group("properties");
    g.sample_size(10);
    g.bench_function("20 trials", |b| {
        b.iter(|| {
            run_properties_with(
                &GenConfig::with_seed(1),
                20,
                Limits::default(),
                &honest,
                &Property::ALL,
                false,
            )
        })
    });
    g.finish();
}

criterion_group!(benches, front_end, transformation, evaluation, fuzzing);
criterion_main!(benches);
