use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rotgp_core::energy::gp_energy;
use rotgp_core::grid::laplacian_apply;
use rotgp_core::minimize::{flow_step, solve};
use rotgp_core::townes::solve_townes;
use rotgp_core::{ComplexField, DomainSpec, Grid, PotentialSpec, SolverConfig};

fn gaussian(n: usize) -> ComplexField {
    let g = Arc::new(Grid::new(DomainSpec::disk(4.0), n, n).unwrap());
    let mut u = ComplexField::from_fn(g, |x, y| {
        Complex64::from_polar((-(x * x + 2.0 * y * y)).exp(), 0.3 * x * y)
    });
    u.normalize().unwrap();
    u
}

fn townes(c: &mut Criterion) {
    c.bench_function("townes_solve", |b| {
        b.iter(|| solve_townes(black_box(1e-12), 20.0).unwrap())
    });
}

fn operators(c: &mut Criterion) {
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let mut group = c.benchmark_group("operators");
    for n in [129, 257, 513] {
        let u = gaussian(n);
        group.bench_with_input(BenchmarkId::new("laplacian", n), &u, |b, u| {
            b.iter(|| laplacian_apply(black_box(u)))
        });
        group.bench_with_input(BenchmarkId::new("energy", n), &u, |b, u| {
            b.iter(|| gp_energy(black_box(u), 10.0, &pot).unwrap())
        });
    }
    group.finish();
}

fn flow(c: &mut Criterion) {
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let mut group = c.benchmark_group("flow");
    group.sample_size(20);
    for n in [129, 257] {
        let u = gaussian(n);
        group.bench_with_input(BenchmarkId::new("flow_step", n), &u, |b, u| {
            b.iter(|| flow_step(black_box(u), 10.0, &pot, 1.0, 1e-3).unwrap())
        });
    }
    group.finish();
}

fn minimize(c: &mut Criterion) {
    let profile = solve_townes(1e-12, 20.0).unwrap();
    let pot = PotentialSpec::new(2.0, 1.0).unwrap();
    let grid = Arc::new(Grid::new(DomainSpec::disk(4.0), 65, 65).unwrap());
    let config = SolverConfig::default();
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    group.bench_function("solve_65_half_critical", |b| {
        b.iter(|| solve(&grid, &profile, 0.5 * profile.a_star, &pot, &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, townes, operators, flow, minimize);
criterion_main!(benches);
