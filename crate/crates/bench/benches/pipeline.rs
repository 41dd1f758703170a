//! Criterion benchmarks for the hot pipeline stages: the match distance,
//! database queries at several sizes, needle-map propagation, and the
//! relaxation integrator.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use needlecast_core::exemplar::{
    distance, extract_exemplars, DistanceConfig, Exemplar, ExemplarDb, Probe, SamplingMode,
};
use needlecast_core::grid::{NeedleMap, RegionMask};
use needlecast_core::integrate::{integrate, IntegratorConfig};
use needlecast_core::render::{render, RenderConfig};
use needlecast_core::solver::{boundary_from_truth, propagate, PropagateConfig};
use needlecast_core::surface::{depth_to_angles, AnalyticSurface, SurfaceId};

fn random_exemplar(rng: &mut ChaCha8Rng) -> Exemplar {
    Exemplar::new(
        rng.gen_range(0.0..=1.0),
        [
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(0.0..=1.0),
        ],
        [
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
        ],
        rng.gen_range(-PI..PI),
    )
}

fn bench_distance(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let e = random_exemplar(&mut rng);
    let p = {
        let t = random_exemplar(&mut rng);
        Probe::new(t.g_center, t.g_nbr, t.s_nbr)
    };
    let cfg = DistanceConfig::default();
    c.bench_function("distance", |b| {
        b.iter(|| distance(black_box(&p), black_box(&e), &cfg))
    });
}

fn bench_nearest(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = DistanceConfig::default();
    let mut group = c.benchmark_group("nearest");
    for n in [1_000usize, 10_000, 50_000] {
        let records: Vec<Exemplar> = (0..n).map(|_| random_exemplar(&mut rng)).collect();
        let db = ExemplarDb::from_source("bench", records, SamplingMode::Overlapping);
        let probes: Vec<Probe> = (0..64)
            .map(|_| {
                let t = random_exemplar(&mut rng);
                Probe::new(t.g_center, t.g_nbr, t.s_nbr)
            })
            .collect();
        let mut k = 0usize;
        group.bench_with_input(BenchmarkId::from_parameter(n), &db, |b, db| {
            b.iter(|| {
                k = (k + 1) % probes.len();
                db.nearest(black_box(&probes[k]), &cfg).unwrap()
            })
        });
    }
    group.finish();
}

fn bench_propagate(c: &mut Criterion) {
    let n = 32;
    let depth = AnalyticSurface::with_default_domain(SurfaceId::F1, (n, n)).eval();
    let angles = depth_to_angles(&depth);
    let img = render(&depth, &RenderConfig::default());
    let records = extract_exemplars(&img, &angles, SamplingMode::Overlapping).unwrap();
    let db = ExemplarDb::from_source("f1", records, SamplingMode::Overlapping);
    let bc = boundary_from_truth(&angles, &RegionMask::full(n, n)).unwrap();
    let cfg = PropagateConfig::synthetic();
    c.bench_function("propagate_32x32_self", |b| {
        b.iter(|| propagate(black_box(&img), &bc, &db, &cfg).unwrap())
    });
}

fn bench_integrate(c: &mut Criterion) {
    let n = 64;
    let depth = AnalyticSurface::with_default_domain(SurfaceId::F1, (n, n)).eval();
    let angles = depth_to_angles(&depth);
    let mut nm = NeedleMap::empty(n, n);
    for i in 0..n {
        for j in 0..n {
            nm.set(i, j, angles.at(i, j), 0.0);
        }
    }
    let cfg = IntegratorConfig {
        max_iter: 1000,
        tol: 1e-30, // run the full thousand sweeps
        boundary_z: Some(depth.clone()),
        ..IntegratorConfig::for_grid(n, n, depth.spacing())
    };
    c.bench_function("integrate_64x64_1000_sweeps", |b| {
        b.iter(|| match integrate(black_box(&nm), &cfg) {
            Ok(r) => r.iterations,
            Err(needlecast_core::integrate::IntegrateError::NotConverged(p)) => p.iterations,
        })
    });
}

criterion_group!(
    benches,
    bench_distance,
    bench_nearest,
    bench_propagate,
    bench_integrate
);
criterion_main!(benches);
