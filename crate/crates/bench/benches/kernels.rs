use std::hint::black_box;

use conic_heat::model::mellin_diag_closed;
use conic_heat::special::{bessel_ik, bessel_j_zeros};
use conic_heat::spectral::{build_mode_operator, eigenvalues};
use conic_heat::{default_basis, fit_expansion, full_spectrum, heat_trace, FitOptions, Profile, TimeGrid};
use criterion::{criterion_group, criterion_main, Criterion};

fn special(c: &mut Criterion) {
    c.bench_function("bessel_ik nu=2.5 x=0.7..40", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 1..=64 {
                let v = bessel_ik(2.5, black_box(0.7 + 0.61 * i as f64)).unwrap();
                acc += v.i * v.k;
            }
            acc
        })
    });
    c.bench_function("bessel_j_zeros nu=6 x40", |b| b.iter(|| bessel_j_zeros(black_box(6.0), 40).unwrap()));
    c.bench_function("mellin_diag_closed d=2", |b| b.iter(|| mellin_diag_closed(black_box(1.5), 2, black_box(-2.3)).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let curved = Profile::curved_spindle(0.6, 0.4).unwrap();
    let op = build_mode_operator(&curved, 3);
    c.bench_function("mode eigenvalues k=3 below 2000", |b| b.iter(|| eigenvalues(&op, black_box(2000.0), 1e-10).unwrap()));

    let mut group = c.benchmark_group("full spectrum");
    group.sample_size(10);
    group.bench_function("curved spindle below 1000", |b| b.iter(|| full_spectrum(&curved, black_box(1000.0), 1e-10).unwrap()));
    group.finish();
}

fn traces(c: &mut Criterion) {
    let sphere = Profile::sphere();
    let spectrum = full_spectrum(&sphere, 2000.0, 1e-10).unwrap();
    let area = sphere.volume().unwrap();
    let times = TimeGrid::default().points().unwrap();
    c.bench_function("heat_trace sphere 2000", |b| b.iter(|| heat_trace(&spectrum, area, black_box(&times), 1e-9).unwrap()));

    let samples = heat_trace(&spectrum, area, &times, 1e-9).unwrap();
    let opts = FitOptions::new(default_basis(sphere.topology()));
    c.bench_function("fit_expansion sphere", |b| b.iter(|| fit_expansion(black_box(&samples), &opts).unwrap()));
}

criterion_group!(benches, special, spectra, traces);
criterion_main!(benches);
