use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hetnet_wpt::montecarlo::{measure_association, measure_energy, measure_uplink_rate};
use hetnet_wpt::uplink::stable_powers;
use hetnet_wpt::{McOptions, Scheme};
use hetnet_wpt_bench::{energy_network, rate_network};

fn simulation(c: &mut Criterion) {
    let energy = energy_network();
    let rate = rate_network();
    let powers = stable_powers(Scheme::Drsp, &rate).expect("stable powers");
    let opts = McOptions {
        n_geometry: 10_000,
        ..McOptions::default()
    };
    let mut group = c.benchmark_group("monte carlo, 1e4 drops");
    group.sample_size(10);
    group.bench_function("association", |b| b.iter(|| measure_association(black_box(Scheme::Drsp), &energy, &opts)));
    group.bench_function("energy", |b| b.iter(|| measure_energy(black_box(Scheme::Drsp), &energy, &opts)));
    group.bench_function("uplink rate", |b| b.iter(|| measure_uplink_rate(&rate, black_box(&powers), &opts)));
    group.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
