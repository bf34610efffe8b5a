use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fransim_bench::{fringe_workload, sampling_trials, search_grid_step};
use fransim_core::correlation::{optimize_chsh, scan_fringe};
use fransim_core::montecarlo::estimate_e;
use fransim_core::BenchConfig;

fn fringe_scan(c: &mut Criterion) {
    let spec = fringe_workload();
    c.bench_function("coincidence_scan_720x4", |b| {
        b.iter(|| scan_fringe(black_box(&spec)).unwrap())
    });
}

fn chsh_search(c: &mut Criterion) {
    let cfg = BenchConfig::default();
    let step = search_grid_step();
    c.bench_function("optimize_chsh_pi_over_16", |b| {
        b.iter(|| optimize_chsh(black_box(&cfg), black_box(step)).unwrap())
    });
}

fn photon_sampling(c: &mut Criterion) {
    let cfg = BenchConfig::default();
    let n = sampling_trials();
    c.bench_function("estimate_e_20k_trials", |b| {
        b.iter(|| estimate_e(black_box(0.0), black_box(-0.3), &cfg, n, 42).unwrap())
    });
}

criterion_group! {
    name = pipeline;
    config = Criterion::default().sample_size(10);
    targets = fringe_scan, chsh_search, photon_sampling
}
criterion_main!(pipeline);
