use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfw_bench::{gradients, l1_disk, l2_disk};
use mfw_core::presets::{preset, PRESET_NAMES};
use mfw_core::{run, solve_minmax, theta_tilde};
use std::hint::black_box;

fn subproblem(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_minmax");
    for m in [2, 3, 5] {
        let (g, x) = gradients(m);
        for (name, set) in [("l1", l1_disk()), ("l2", l2_disk())] {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, _| {
                b.iter(|| solve_minmax(black_box(&g), black_box(&x), &set, 1e-10).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("theta_tilde", m), &m, |b, _| {
            b.iter(|| theta_tilde(black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn presets(c: &mut Criterion) {
    let mut group = c.benchmark_group("preset");
    group.sample_size(10);
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        group.bench_function(name, |b| b.iter(|| run(&p.objective, &p.set, &p.config).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, subproblem, presets);
criterion_main!(benches);
