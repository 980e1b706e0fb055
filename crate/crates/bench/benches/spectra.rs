use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morsekit_bench::{pulse_schedule, resolved_model, sweep};
use morsekit_core::pulsed::{pulsed_mors_with, PulsedOptions, SteadyStateMethod};
use morsekit_core::spectrum::mors_power;
use std::hint::black_box;

fn cw(c: &mut Criterion) {
    let model = resolved_model();
    let mut group = c.benchmark_group("mors_power");
    for points in [501, 2001, 8001] {
        let grid = sweep(points);
        group.bench_with_input(BenchmarkId::from_parameter(points), &grid, |b, g| {
            b.iter(|| mors_power(black_box(&model), black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn pulsed(c: &mut Criterion) {
    let schedule = pulse_schedule();
    let grid = sweep(2001);
    let mut group = c.benchmark_group("pulsed_sweep_2001");
    for (name, method) in [
        ("closed_form", SteadyStateMethod::ClosedForm),
        ("iterate", SteadyStateMethod::Iterate),
    ] {
        let options = PulsedOptions {
            method,
            ..PulsedOptions::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| pulsed_mors_with(black_box(&schedule), black_box(&grid), &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cw, pulsed);
criterion_main!(benches);
