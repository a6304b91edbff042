use std::f64::consts::{FRAC_PI_4, TAU};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ionglow::collection::{flux, CollectionAperture};
use ionglow::crystal::{axial_modes, equilibrium_positions, CrystalGeometry};
use ionglow::optimize::{optimize_length_scale, ScanSpec};
use ionglow::physical::IonSpecies;
use ionglow::scattering::ScatterScenario;

fn bench_equilibrium(c: &mut Criterion) {
    let mut group = c.benchmark_group("equilibrium_positions");
    for n in [5usize, 15, 30, 50] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| equilibrium_positions(black_box(n)).unwrap());
        });
    }
    group.finish();
}

fn bench_axial_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("axial_modes");
    for n in [5usize, 15, 30] {
        let geom = CrystalGeometry::harmonic(n, 5e-6).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &geom, |b, geom| {
            b.iter(|| axial_modes(black_box(geom), TAU * 1e6).unwrap());
        });
    }
    group.finish();
}

fn bench_intensity(c: &mut Criterion) {
    let mut group = c.benchmark_group("intensity");
    for n in [2usize, 5, 10] {
        let geom = CrystalGeometry::harmonic(n, 10e-6).unwrap();
        let scenario = ScatterScenario::new(geom, TAU / 397e-9, FRAC_PI_4).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &scenario, |b, s| {
            b.iter(|| s.intensity(black_box(0.03)));
        });
    }
    group.finish();
}

fn bench_flux(c: &mut Criterion) {
    let mut group = c.benchmark_group("flux");
    group.sample_size(40);
    for (n, l_um) in [(5usize, 5.0), (9, 40.0)] {
        let geom = CrystalGeometry::harmonic(n, l_um * 1e-6).unwrap();
        let scenario = ScatterScenario::new(geom, TAU / 397e-9, FRAC_PI_4).unwrap();
        let aperture = CollectionAperture::from_na(0.07).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_l{l_um}um")),
            &scenario,
            |b, s| {
                b.iter(|| flux(black_box(s), &aperture).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_optimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_length_scale");
    group.sample_size(10);
    let spec = ScanSpec::new(3, IonSpecies::calcium_40(), FRAC_PI_4, TAU * 5.0e6)
        .unwrap()
        .with_samples(300);
    let aperture = CollectionAperture::from_na(0.07).unwrap();
    group.bench_function("n3_300_samples", |b| {
        b.iter(|| optimize_length_scale(black_box(&spec), &aperture).unwrap());
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_equilibrium,
    bench_axial_modes,
    bench_intensity,
    bench_flux,
    bench_optimize
);
criterion_main!(benches);
