use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use entropybench_core::battery::{run_batteries, BatteryConfig};
use entropybench_core::shuffle::{distance_histogram, mean_oracle_sweep, uniform_shuffle_oracle, SweepMode};
use entropybench_core::sources::{draw_integers, SampleSource};
use entropybench_core::Execution;

fn strategies() -> Vec<(&'static str, Execution)> {
    let mut s = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        s.push(("parallel", Execution::Parallel));
    }
    s
}

fn batteries(c: &mut Criterion) {
    let samples: Vec<_> = (0..8)
        .map(|seed| draw_integers(&SampleSource::seeded(seed), 12_500, 255).unwrap())
        .collect();
    let config = BatteryConfig::default();
    let mut group = c.benchmark_group("run_batteries_8x100kbit");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_batteries(black_box(&samples), &config, exec).unwrap())
        });
    }
    group.finish();
}

fn histogram(c: &mut Criterion) {
    let set = uniform_shuffle_oracle(10, 100_000, 1).unwrap();
    let mut group = c.benchmark_group("distance_histogram_n10_100k");
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| distance_histogram(black_box(&set), exec))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let rounds = [128, 256, 512, 786, 1024, 1280, 1536, 1792, 2048];
    let seeds: Vec<u64> = (0..20).collect();
    let mut group = c.benchmark_group("mean_oracle_sweep_20_seeds");
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mean_oracle_sweep(10, &rounds, black_box(&seeds), SweepMode::Cumulative, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batteries, histogram, sweep);
criterion_main!(benches);
