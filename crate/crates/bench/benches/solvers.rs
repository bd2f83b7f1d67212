use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use grid_extremal::asymptotics::monic_route;
use grid_extremal::equilibrium::{c_integral, j_functional, mu_alpha, potential, JOptions};
use grid_extremal::grid_poly::{roots_in_window, ChebPoly, Grid};
use grid_extremal::ratio_extremal::phi;
use grid_extremal::{solve_monic_min, solve_ratio_extremal};

fn constants(c: &mut Criterion) {
    c.bench_function("c_integral alpha=0.5", |b| b.iter(|| c_integral(black_box(0.5)).unwrap()));
    let m = mu_alpha(0.5).unwrap();
    c.bench_function("mu_alpha potential x=0.3", |b| {
        b.iter(|| potential(&m.measure, black_box(0.3)).unwrap())
    });
    c.bench_function("J(mu_alpha) alpha=0.5", |b| {
        b.iter(|| j_functional(&m.measure, JOptions::default()).unwrap())
    });
}

fn polynomials(c: &mut Criterion) {
    let p = ChebPoly::monic_chebyshev(80);
    c.bench_function("roots degree 80", |b| b.iter(|| roots_in_window(black_box(&p), -1.0, 1.0).unwrap()));
    let g = Grid::new(80).unwrap();
    c.bench_function("monic min n=80 d=40", |b| b.iter(|| solve_monic_min(&g, black_box(40)).unwrap()));
    c.bench_function("phi n=80 d=40 near -1", |b| b.iter(|| phi(&g, 40, black_box(-0.9936)).unwrap()));
}

fn extremal(c: &mut Criterion) {
    let mut group = c.benchmark_group("extremal");
    group.sample_size(10);
    group.bench_function("ratio n=40 alpha=0.5", |b| b.iter(|| solve_ratio_extremal(black_box(40), 0.5).unwrap()));
    group.bench_function("monic route n=80 d=40", |b| b.iter(|| monic_route(black_box(80), 40).unwrap()));
    group.finish();
}

criterion_group!(benches, constants, polynomials, extremal);
criterion_main!(benches);
