use std::hint::black_box;
use std::time::Duration;

use cadseq::fixture::{cylinder, hollow_cube, long_tail_corpus, split_corpus};
use cadseq::geom::{compile, monte_carlo_volume_with, sample_surface};
use cadseq::metrics::{chamfer_distance_with, invalid_ratio_with, retrieval_topn_with, EmbeddingSet};
use cadseq::par::{self, Exec};
use cadseq::synthbal::{generate_synthbal, AugmentationPolicy, Dataset, PolicyKind, SynthBalConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn volume(c: &mut Criterion) {
    let solid = compile(&hollow_cube()).unwrap();
    let mut g = c.benchmark_group("mc_volume_200k");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| monte_carlo_volume_with(black_box(&solid), 200_000, 1, exec)));
    }
    g.finish();
}

fn chamfer(c: &mut Criterion) {
    let a = sample_surface(&compile(&hollow_cube()).unwrap(), 2000, 1).unwrap();
    let b2 = sample_surface(&compile(&cylinder()).unwrap(), 2000, 2).unwrap();
    let mut g = c.benchmark_group("chamfer_2000");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| chamfer_distance_with(black_box(&a), black_box(&b2), exec)));
    }
    g.finish();
}

fn validate(c: &mut Criterion) {
    let corpus = long_tail_corpus(3, 200);
    let mut g = c.benchmark_group("validate_batch");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, corpus.len()), &corpus, |b, corpus| {
            b.iter(|| invalid_ratio_with(corpus, exec).unwrap())
        });
    }
    g.finish();
}

fn retrieval(c: &mut Criterion) {
    let n = 4096;
    let random = |tag: u64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut rng = par::rng_from(tag, &[i as u64]);
                (0..16).map(|_| rng.random::<f64>() - 0.5).collect()
            })
            .collect()
    };
    let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let q = EmbeddingSet::new(ids.clone(), random(1), "cad".into()).unwrap();
    let l = EmbeddingSet::new(ids, random(2), "mesh".into()).unwrap();
    let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let mut g = c.benchmark_group("retrieval_2048x10");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| retrieval_topn_with(&q, &l, &pairs, 1, 2048, 10, 5, exec).unwrap()));
    }
    g.finish();
}

fn synthbal(c: &mut Criterion) {
    let data = Dataset::from_programs(split_corpus(4, |_, _| 2)).unwrap();
    let cfg = SynthBalConfig::new(0.2, 1140, AugmentationPolicy::named(PolicyKind::Default), 9);
    let mut g = c.benchmark_group("synthbal_1140");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| generate_synthbal(&data, &cfg, exec).unwrap()));
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(3));
    targets = volume, chamfer, validate, retrieval, synthbal
}
criterion_main!(benches);
