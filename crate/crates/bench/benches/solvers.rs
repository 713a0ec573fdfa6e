use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mtet_bench::seeded;
use mtet_core::carving::{ball_carve_distributed, ball_carve_sequential, network_decomposition};
use mtet_core::lbgraph::{add_inputs, build_fixed, verify_lemma};
use mtet_core::mhvc::{mtet_via_mhvc, MhvcConfig, MhvcVariant};
use mtet_core::oracle::{tau, SolverConfig};
use mtet_core::simnet::programs::triangle_discovery;
use mtet_core::simnet::SimModel;
use mtet_core::{Graph, Weight};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for n in [6, 7] {
        let k = Graph::complete(n);
        g.bench_with_input(BenchmarkId::new("clique", n), &k, |b, k| b.iter(|| tau(black_box(k)).unwrap()));
    }
    let r = seeded(20, 0.3, 1);
    g.bench_function("gnp_20", |b| b.iter(|| tau(black_box(&r)).unwrap()));
    let fixed = build_fixed(2).unwrap();
    let inst = add_inputs(&fixed, &[true, false, false, true], &[true, false, false, false]).unwrap();
    g.sample_size(10);
    g.bench_function("lemma_k2", |b| b.iter(|| verify_lemma(black_box(&inst), false).unwrap()));
    g.finish();
}

fn carving(c: &mut Criterion) {
    let mut g = c.benchmark_group("carving");
    g.sample_size(20);
    let cfg = SolverConfig::default();
    let eps = Weight::new(1, 2);
    for n in [12, 20] {
        let graph = seeded(n, 0.3, 2);
        let order: Vec<usize> = (0..n).collect();
        g.bench_with_input(BenchmarkId::new("sequential", n), &graph, |b, graph| {
            b.iter(|| ball_carve_sequential(graph, eps, &order, &cfg).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("distributed", n), &graph, |b, graph| {
            b.iter(|| ball_carve_distributed(graph, eps, 3, &cfg).unwrap())
        });
    }
    let big = seeded(200, 0.05, 4);
    g.bench_function("decomposition_200", |b| b.iter(|| network_decomposition(black_box(&big), 4, 5)));
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulation");
    g.sample_size(20);
    let graph = seeded(24, 0.3, 6);
    for model in [SimModel::local(), SimModel::congest()] {
        g.bench_function(format!("discovery_{model}"), |b| b.iter(|| triangle_discovery(black_box(&graph), model).unwrap()));
        for variant in [MhvcVariant::Matching, MhvcVariant::PrimalDual] {
            let cfg = MhvcConfig::new(variant);
            g.bench_function(format!("{variant}_{model}"), |b| b.iter(|| mtet_via_mhvc(&graph, &cfg, model, 7, false).unwrap()));
        }
    }
    g.finish();
}

criterion_group!(benches, exact, carving, simulation);
criterion_main!(benches);
