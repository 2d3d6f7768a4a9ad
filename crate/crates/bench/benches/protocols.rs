use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kaon_bench::{swap_setup, teleport_setup};
use kaon_core::montecarlo::{run_ensemble_with, EventSampler};
use kaon_core::{kaon, protocols, Constants, PairBasisVector, RetainPolicy, SingleKaon};
use std::hint::black_box;

fn bench_evolve(c: &mut Criterion) {
    let k = Constants::paper();
    let s = SingleKaon::k0();
    c.bench_function("evolve single kaon", |b| b.iter(|| kaon::evolve(black_box(&s), black_box(1.3), &k)));
}

fn bench_projection(c: &mut Criterion) {
    let setup = swap_setup();
    let state = protocols::build_state_at_collision(&setup).unwrap();
    c.bench_function("project 4-kaon state", |b| {
        b.iter(|| protocols::collide_project(black_box(&state), PairBasisVector::Phi4))
    });
}

fn bench_ensemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    let n = 100_000u64;
    group.throughput(Throughput::Elements(n));
    group.sample_size(10);
    for (name, setup) in [("teleport", teleport_setup()), ("swap", swap_setup())] {
        let sampler = EventSampler::new(&setup, setup.kin.t_x + 1.0, RetainPolicy::default()).unwrap();
        group.bench_with_input(BenchmarkId::new(name, n), &sampler, |b, s| {
            b.iter(|| run_ensemble_with(s, n, 42, None))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evolve, bench_projection, bench_ensemble);
criterion_main!(benches);
