// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use twophoton_bench::{simulation, REGIMES};
use twophoton_core::dynamics::uniform_grid;
use twophoton_core::propagator::{analytic_block, sector_hamiltonian, Sector, SectorEigen};
use twophoton_core::{herm_eigen, negativity, Engine};

fn small_matrices(c: &mut Criterion) {
    let h = sector_hamiltonian(Sector::Quad { m1: 7, m2: 3 }, 0.3);
    c.bench_function("herm_eigen/quad", |b| b.iter(|| herm_eigen(black_box(&h), 1e-10).unwrap()));

    let sim = simulation(0.1, 0.2);
    let rho = sim.evolve(3.0, Engine::Numeric).unwrap().normalized();
    c.bench_function("negativity", |b| b.iter(|| negativity(black_box(&rho)).unwrap()));
}

fn propagators(c: &mut Criterion) {
    let sector = Sector::Quad { m1: 12, m2: 9 };
    let eig = SectorEigen::new(sector, 0.3).unwrap();
    let mut g = c.benchmark_group("sector_propagator");
    g.bench_function("numeric", |b| b.iter(|| eig.propagator(black_box(7.5))));
    g.bench_function("analytic", |b| b.iter(|| analytic_block(sector, 0.3, black_box(7.5)).unwrap()));
    g.finish();
}

fn series(c: &mut Criterion) {
    let grid = uniform_grid(25.0, 50);
    let mut g = c.benchmark_group("negativity_series_50pts");
    g.sample_size(10);
    for (alpha, nbar) in REGIMES {
        let sim = simulation(alpha, nbar);
        for engine in [Engine::Numeric, Engine::Analytic] {
            g.bench_with_input(BenchmarkId::new(format!("{engine:?}"), nbar), &sim, |b, sim| {
                b.iter(|| sim.negativity_series(&grid, engine).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, small_matrices, propagators, series);
criterion_main!(benches);
