use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use flashcodes::graph::DataGraph;
use flashcodes::harness::sequence::{cyclic_sequence, random_walk_sequence};
use flashcodes::harness::{balls_in_bins_first_full, measure, worst_case_t};
use flashcodes::parametric::RobustCode;
use flashcodes::registers::{ModularCode, SplitCode};
use flashcodes::trajectory::TrajectoryCode;

fn bench_register_codes(c: &mut Criterion) {
    let graph = DataGraph::complete(56).unwrap();
    let seq = cyclic_sequence(&graph, 48).unwrap();
    let split = SplitCode::new(16, 4, 56).unwrap();
    c.bench_function("split_16_4_56_full_run", |b| {
        b.iter(|| measure(black_box(&split), &graph, &seq).t)
    });

    let graph64 = DataGraph::complete(64).unwrap();
    let seq64 = cyclic_sequence(&graph64, 448).unwrap();
    let modular = ModularCode::new(64, 8, 64).unwrap();
    c.bench_function("modular_64_8_64_full_run", |b| {
        b.iter(|| measure(black_box(&modular), &graph64, &seq64).t)
    });
}

fn bench_robust(c: &mut Criterion) {
    let graph = DataGraph::complete(4).unwrap();
    let seq = cyclic_sequence(&graph, 448).unwrap();
    c.bench_function("robust_64_8_4_stop_at_full_run", |b| {
        let code = RobustCode::sample(64, 8, 4, 7, true).unwrap();
        b.iter(|| measure(black_box(&code), &graph, &seq).t)
    });
    c.bench_function("balls_in_bins_200_trials", |b| {
        b.iter(|| balls_in_bins_first_full(black_box(&[112; 4]), 200, 7).mean)
    });
}

fn bench_trajectory(c: &mut Criterion) {
    let graph = Arc::new(DataGraph::hypercube(4, 2).unwrap());
    let code = TrajectoryCode::plan(64, 8, Arc::clone(&graph), 448).unwrap();
    let seq = random_walk_sequence(&graph, 7, 448).unwrap();
    c.bench_function("trajectory_hypercube_full_run", |b| {
        b.iter(|| measure(black_box(&code), &graph, &seq).t)
    });
}

fn bench_adversary(c: &mut Criterion) {
    let code = ModularCode::new(8, 2, 8).unwrap();
    let graph = DataGraph::complete(8).unwrap();
    c.bench_function("worst_case_t_modular_8_2", |b| {
        b.iter(|| worst_case_t(black_box(&code), &graph, 10_000_000).unwrap())
    });
}

criterion_group!(
    benches,
    bench_register_codes,
    bench_robust,
    bench_trajectory,
    bench_adversary
);
criterion_main!(benches);
