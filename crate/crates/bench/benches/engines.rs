use criterion::{criterion_group, criterion_main, Criterion};
use depdec_bench::{abl_problem, distributive_pair, fm_system, group_words, lattice_tree, problem, words};
use depdec_core::linear::fm_eliminate;
use depdec_core::oracle::brute_dependence;
use depdec_core::word::{nielsen_reduce, sardinas_patterson};
use depdec_core::{decide, lat_leq, Signature};
use std::hint::black_box;

fn lattices(c: &mut Criterion) {
    let s = lattice_tree(6, 0);
    let t = lattice_tree(6, 1);
    c.bench_function("lat_leq depth 6", |b| b.iter(|| lat_leq(black_box(&s), black_box(&t)).unwrap()));
    let dlat = distributive_pair(Signature::DLat);
    let lat = distributive_pair(Signature::Lat);
    c.bench_function("decide DLAT pair", |b| b.iter(|| decide(black_box(&dlat)).unwrap()));
    c.bench_function("decide LAT pair", |b| b.iter(|| decide(black_box(&lat)).unwrap()));
}

fn words_and_groups(c: &mut Criterion) {
    let code = words(&["x", "xy", "yx", "yyx", "xyy"]);
    c.bench_function("sardinas_patterson 5 words", |b| b.iter(|| sardinas_patterson(black_box(&code))));
    let tuple = group_words(&["xyxY", "yxXy", "xxyXX", "yyx"]);
    c.bench_function("nielsen_reduce 4 words", |b| b.iter(|| nielsen_reduce(black_box(&tuple)).unwrap()));
}

fn linear(c: &mut Criterion) {
    let sys = fm_system(12);
    c.bench_function("fm_eliminate 12 constraints", |b| b.iter(|| fm_eliminate(black_box(&sys), "x")));
    let p = abl_problem("variety: ABL\nterm: x1 v x2\nterm: x1 ^ x2\nterm: x1 + x2\n");
    c.bench_function("decide ABL max/min/sum", |b| b.iter(|| decide(black_box(&p)).unwrap()));
    let q = problem(Signature::VecQ, &["x1 + 2|x2", "x1 + -x2", "x2"]);
    c.bench_function("decide VECQ triple", |b| b.iter(|| decide(black_box(&q)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let p = problem(Signature::Lat, &["x v y", "x ^ y"]);
    c.bench_function("brute_dependence LAT bound 5", |b| b.iter(|| brute_dependence(black_box(&p), 5).unwrap()));
}

criterion_group!(benches, lattices, words_and_groups, linear, oracle);
criterion_main!(benches);
