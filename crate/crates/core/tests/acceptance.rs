//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (run with `-- --nocapture` to see
//! them). Tolerances are pinned here, not configurable.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use needlecast_core::angles::wrap_angle_diff;
use needlecast_core::exemplar::{
    distance, extract_exemplars, DistanceConfig, Exemplar, ExemplarDb, Probe, SamplingMode,
};
use needlecast_core::gallery;
use needlecast_core::grid::{DepthMap, GrayImage, NeedleMap, OrientationField, RegionMask};
use needlecast_core::integrate::{integrate, IntegratorConfig};
use needlecast_core::io;
use needlecast_core::metrics::{avg_min_distance, depth_rmse_aligned, slant_error, EvalReport};
use needlecast_core::render::{render, tilt_from_intensity, RenderConfig};
use needlecast_core::solver::{
    boundary_from_silhouette, boundary_from_truth, propagate, PropagateConfig,
};
use needlecast_core::surface::{depth_to_angles, AnalyticSurface, SurfaceId};
use needlecast_core::Orientation;

const RES: (usize, usize) = (64, 64);

/// Depth, orientations and frontal rendering of a training/test object.
struct Object {
    name: &'static str,
    depth: DepthMap,
    angles: OrientationField,
    image: GrayImage,
}

fn object(name: &'static str) -> Object {
    let depth = match name {
        "f1" => AnalyticSurface::with_default_domain(SurfaceId::F1, RES).eval(),
        "f2" => AnalyticSurface::with_default_domain(SurfaceId::F2, RES).eval(),
        "f3" => AnalyticSurface::with_default_domain(SurfaceId::F3, RES).eval(),
        "vase" => gallery::vase(RES.0, RES.1),
        other => panic!("unknown object {other}"),
    };
    let angles = depth_to_angles(&depth);
    let image = render(&depth, &RenderConfig::default());
    Object {
        name,
        depth,
        angles,
        image,
    }
}

fn db_of(objects: &[&Object]) -> ExemplarDb {
    let dbs: Vec<ExemplarDb> = objects
        .iter()
        .map(|o| {
            let records =
                extract_exemplars(&o.image, &o.angles, SamplingMode::Overlapping).unwrap();
            ExemplarDb::from_source(o.name, records, SamplingMode::Overlapping)
        })
        .collect();
    ExemplarDb::merge(&dbs).unwrap()
}

fn reconstruct(obj: &Object, db: &ExemplarDb) -> NeedleMap {
    let mask = RegionMask::full(obj.image.width(), obj.image.height());
    let bc = boundary_from_truth(&obj.angles, &mask).unwrap();
    propagate(&obj.image, &bc, db, &PropagateConfig::synthetic()).unwrap()
}

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

fn random_probe(rng: &mut ChaCha8Rng) -> Probe {
    let e = random_exemplar(rng);
    Probe::new(e.g_center, e.g_nbr, e.s_nbr)
}

#[test]
fn criterion_1_self_consistency() {
    let start = Instant::now();
    let objects = [object("f1"), object("f2"), object("f3"), object("vase")];
    let db = db_of(&objects.iter().collect::<Vec<_>>());
    for obj in &objects {
        let nm = reconstruct(obj, &db);
        let avg = avg_min_distance(&nm).unwrap();
        let serr = slant_error(&nm, &obj.angles).unwrap();
        println!(
            "criterion 1: {} avg_match_distance={avg} slant_error={serr}",
            obj.name
        );
        assert_eq!(
            avg, 0.0,
            "{}: self-test average distance must be exactly 0",
            obj.name
        );
        assert_eq!(
            serr, 0.0,
            "{}: self-test slant error must be exactly 0",
            obj.name
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    println!("criterion 1 (self-consistency on own renderings): PASS ({elapsed:?})");
}

#[test]
fn criterion_2_cross_generalization_trend() {
    let f1 = object("f1");
    let f2 = object("f2");
    let f3 = object("f3");
    let db_f1 = db_of(&[&f1]);
    let db_f1f2 = db_of(&[&f1, &f2]);

    let cross = avg_min_distance(&reconstruct(&f2, &db_f1)).unwrap();
    let self_avg = avg_min_distance(&reconstruct(&f2, &db_f1f2)).unwrap();
    println!("criterion 2: avg(db=f1, test=f2)={cross} avg(db=f1+f2, test=f2)={self_avg}");
    assert_eq!(self_avg, 0.0);
    assert!(cross > self_avg);
    assert!(
        cross > 0.0 && cross < 0.3,
        "cross-source average {cross} outside (0, 0.3)"
    );

    let cross_f3 = avg_min_distance(&reconstruct(&f3, &db_f1f2)).unwrap();
    println!("criterion 2: avg(db=f1+f2, test=f3)={cross_f3}");
    assert!(
        cross_f3 > 0.0 && cross_f3 < 0.3,
        "cross-source average {cross_f3} outside (0, 0.3)"
    );

    // enlarging a database never increases the average nearest distance
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let cfg = DistanceConfig::default();
    for trial in 0..20 {
        let base: Vec<Exemplar> = (0..rng.gen_range(10..200))
            .map(|_| random_exemplar(&mut rng))
            .collect();
        let mut extended = base.clone();
        extended.extend((0..rng.gen_range(1..200)).map(|_| random_exemplar(&mut rng)));
        let small = ExemplarDb::from_source("s", base, SamplingMode::Overlapping);
        let large = ExemplarDb::from_source("l", extended, SamplingMode::Overlapping);
        let probes: Vec<Probe> = (0..50).map(|_| random_probe(&mut rng)).collect();
        let avg = |db: &ExemplarDb| {
            probes
                .iter()
                .map(|p| db.nearest(p, &cfg).unwrap().distance)
                .sum::<f64>()
                / probes.len() as f64
        };
        let (a_small, a_large) = (avg(&small), avg(&large));
        assert!(a_large <= a_small, "trial {trial}: {a_small} -> {a_large}");
    }
    println!("criterion 2 (cross-generalization trend + monotonicity): PASS");
}

#[test]
fn criterion_3_distance_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let cfg = DistanceConfig::default();
    for _ in 0..100_000 {
        let d = distance(&random_probe(&mut rng), &random_exemplar(&mut rng), &cfg);
        assert!((0.0..=1.0).contains(&d), "distance {d} outside [0, 1]");
    }

    let far = Exemplar::new(1.0, [1.0, 1.0, 1.0], [PI, PI, PI], 0.0);
    let origin = Probe::new(0.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]);
    assert_eq!(distance(&origin, &far, &cfg), 1.0);

    let avg = 0.218_753_1;
    let report = EvalReport::new(avg, None, None, 1);
    assert_eq!(report.avg_match_distance_rad, avg * PI);
    println!("criterion 3 (distance normalized into [0, 1]): PASS");
}

#[test]
fn criterion_4_nearest_neighbor_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let cfg = DistanceConfig::default();
    for _ in 0..100 {
        let records: Vec<Exemplar> = (0..rng.gen_range(1..=5000))
            .map(|_| random_exemplar(&mut rng))
            .collect();
        let db = ExemplarDb::from_source("r", records.clone(), SamplingMode::Overlapping);
        for _ in 0..100 {
            let p = random_probe(&mut rng);
            // independent exhaustive scan, coded against the definition
            let mut best_idx = 0usize;
            let mut best = f64::INFINITY;
            for (idx, e) in records.iter().enumerate() {
                let mut sum = (p.g_center - e.g_center) * (p.g_center - e.g_center);
                for k in 0..3 {
                    let d = p.g_nbr[k] - e.g_nbr[k];
                    sum += d * d;
                }
                for k in 0..3 {
                    let d = wrap_angle_diff(p.s_nbr[k], e.s_nbr[k]).abs() / PI;
                    sum += d * d;
                }
                let d = (sum / 7.0).sqrt();
                if d < best {
                    best = d;
                    best_idx = idx;
                }
            }
            let got = db.nearest(&p, &cfg).unwrap();
            assert_eq!(got.index, best_idx);
            assert_eq!(
                got.distance.to_bits(),
                best.to_bits(),
                "distance bits differ"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget 10 s"
    );
    println!("criterion 4 (nearest neighbor bit-exact vs independent scan): PASS ({elapsed:?})");
}

#[test]
fn criterion_5_tilt_recovery() {
    let ramp = {
        let s = 2.0 / 63.0;
        DepthMap::from_fn(RES.0, RES.1, s, |i, j| {
            0.8 * (j as f64 * s) - 0.3 * (i as f64 * s)
        })
    };
    let cases = [
        (
            "f1",
            AnalyticSurface::with_default_domain(SurfaceId::F1, RES).eval(),
        ),
        (
            "f3",
            AnalyticSurface::with_default_domain(SurfaceId::F3, RES).eval(),
        ),
        ("ramp", ramp),
    ];
    for (name, depth) in &cases {
        let angles = depth_to_angles(depth);
        let img = render(depth, &RenderConfig::default());

        // continuous intensities: per-pixel agreement to 1e-9
        let mut worst = 0.0f64;
        for i in 0..depth.height() {
            for j in 0..depth.width() {
                let t = tilt_from_intensity(img.at(i, j), 1.0).unwrap();
                worst = worst.max((t - angles.at(i, j).tilt()).abs());
            }
        }
        println!("criterion 5: {name} continuous worst tilt error {worst}");
        assert!(worst < 1e-9, "{name}: worst continuous error {worst}");

        // 8-bit quantization: 95th percentile within 0.5 degrees
        let mut errs: Vec<f64> = Vec::new();
        for i in 0..depth.height() {
            for j in 0..depth.width() {
                let q = (img.at(i, j) * 255.0 + 0.5).floor() / 255.0;
                let t = tilt_from_intensity(q, 1.0).unwrap();
                errs.push((t - angles.at(i, j).tilt()).abs());
            }
        }
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let p95 = errs[(errs.len() as f64 * 0.95) as usize].to_degrees();
        println!("criterion 5: {name} quantized 95th-percentile tilt error {p95} deg");
        assert!(p95 <= 0.5, "{name}: p95 {p95} deg");
    }
    println!("criterion 5 (tilt recovery, continuous and 8-bit): PASS");
}

fn truth_needle_map(depth: &DepthMap) -> NeedleMap {
    let angles = depth_to_angles(depth);
    let mut nm = NeedleMap::empty(depth.width(), depth.height());
    for i in 0..depth.height() {
        for j in 0..depth.width() {
            nm.set(i, j, angles.at(i, j), 0.0);
        }
    }
    nm
}

#[test]
fn criterion_6_integration_fidelity() {
    let start = Instant::now();

    // f1 from its analytic needle map, truth depth pinned on the border
    let truth = AnalyticSurface::with_default_domain(SurfaceId::F1, RES).eval();
    let nm = truth_needle_map(&truth);
    let cfg = IntegratorConfig {
        tol: 1e-6 * truth.range(),
        boundary_z: Some(truth.clone()),
        ..IntegratorConfig::for_grid(RES.0, RES.1, truth.spacing())
    };
    assert_eq!(cfg.max_iter, 50 * 64 * 64);
    let out = integrate(&nm, &cfg).expect("must converge inside the iteration budget");
    let rmse = depth_rmse_aligned(&out.depth, &truth).unwrap();
    let rel = rmse / truth.range();
    println!(
        "criterion 6: f1 rmse={rmse} ({:.3}% of range) after {} iterations",
        rel * 100.0,
        out.iterations
    );
    assert!(rel <= 0.02, "relative rmse {rel}");

    // constant-gradient plane with a consistent Dirichlet border is exact
    let n = 16;
    let spacing = 0.25;
    let plane = DepthMap::from_fn(n, n, spacing, |i, j| {
        0.7 * (j as f64 * spacing) + 0.2 * (i as f64 * spacing)
    });
    let nm = truth_needle_map(&plane);
    let cfg = IntegratorConfig {
        tol: 1e-12,
        boundary_z: Some(plane.clone()),
        ..IntegratorConfig::for_grid(n, n, spacing)
    };
    let out = integrate(&nm, &cfg).unwrap();
    let worst = out
        .depth
        .values()
        .iter()
        .zip(plane.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("criterion 6: plane worst abs error {worst}");
    assert!(worst <= 1e-6, "plane error {worst}");

    // flat needle map with constant border depth returns that constant
    let flat = {
        let mut nm = NeedleMap::empty(12, 12);
        for i in 0..12 {
            for j in 0..12 {
                nm.set(i, j, Orientation::new(0.0, 0.0), 0.0);
            }
        }
        nm
    };
    let cfg = IntegratorConfig {
        tol: 1e-12,
        boundary_z: Some(DepthMap::from_fn(12, 12, 1.0, |_, _| 4.5)),
        ..IntegratorConfig::for_grid(12, 12, 1.0)
    };
    let out = integrate(&flat, &cfg).unwrap();
    let worst = out
        .depth
        .values()
        .iter()
        .map(|v| (v - 4.5).abs())
        .fold(0.0f64, f64::max);
    println!("criterion 6: flat worst abs error {worst}");
    assert!(worst <= 1e-9, "flat error {worst}");

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "took {elapsed:?}, budget 60 s"
    );
    println!("criterion 6 (integration fidelity): PASS ({elapsed:?})");
}

#[test]
fn criterion_7_end_to_end_round_trip() {
    let objects = [object("f1"), object("f2")];
    let db = db_of(&objects.iter().collect::<Vec<_>>());
    let f1 = &objects[0];

    let nm = reconstruct(f1, &db);
    let cfg = IntegratorConfig {
        tol: 1e-6 * f1.depth.range(),
        boundary_z: Some(f1.depth.clone()),
        ..IntegratorConfig::for_grid(RES.0, RES.1, f1.depth.spacing())
    };
    let out = integrate(&nm, &cfg).unwrap();
    let rmse = depth_rmse_aligned(&out.depth, &f1.depth).unwrap();
    let rel = rmse / f1.depth.range();
    println!(
        "criterion 7: depth->render->reconstruct->integrate rmse={rmse} ({:.3}% of range)",
        rel * 100.0
    );
    assert!(rel <= 0.03, "relative rmse {rel}");
    println!("criterion 7 (end-to-end round trip): PASS");
}

#[test]
fn criterion_8_silhouette_boundary() {
    let n = 64;
    let (img, _) = gallery::hemisphere_image(n, n);
    let threshold = 0.05;
    let bc = boundary_from_silhouette(&img, threshold).unwrap();

    let mask = RegionMask::from_fn(n, n, |i, j| img.at(i, j) > threshold);
    // pixels whose background contact is only diagonal (4-connected corners
    // of the staircase) are excluded from the measurement
    let on_contour4 = |i: usize, j: usize| {
        [(0isize, 1isize), (0, -1), (1, 0), (-1, 0)]
            .iter()
            .any(|&(di, dj)| !mask.contains(i as isize + di, j as isize + dj))
    };
    let c = (n as f64 - 1.0) / 2.0;
    let mut errs: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(o) = bc.orientation(i, j) {
                if on_contour4(i, j) {
                    let radial = (i as f64 - c).atan2(j as f64 - c);
                    errs.push(wrap_angle_diff(o.slant(), radial).abs().to_degrees());
                }
            }
        }
    }
    assert!(!errs.is_empty());
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    println!(
        "criterion 8: hemisphere silhouette mean slant error {mean:.3} deg over {} pixels",
        errs.len()
    );
    assert!(mean <= 5.0, "mean error {mean} deg");
    println!("criterion 8 (silhouette boundary directions): PASS");
}

#[test]
fn criterion_9_format_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let dir = tempfile::tempdir().unwrap();

    // PGM: 8-bit rasters are exactly representable
    for k in 0..100 {
        let (w, h) = (rng.gen_range(1..16), rng.gen_range(1..16));
        let img = GrayImage::from_fn(w, h, |_, _| rng.gen_range(0u32..=255) as f64 / 255.0);
        let p = dir.path().join(format!("{k}.pgm"));
        io::write_pgm(&p, &img).unwrap();
        assert_eq!(io::read_pgm(&p).unwrap(), img, "pgm round trip {k}");
    }

    // depth matrices at full precision
    for k in 0..100 {
        let (w, h) = (rng.gen_range(1..16), rng.gen_range(1..16));
        let d = DepthMap::from_fn(w, h, rng.gen_range(1e-6..1e3), |_, _| {
            rng.gen_range(-1e9..1e9)
        });
        let p = dir.path().join(format!("{k}.zmat"));
        io::write_depth(&p, &d).unwrap();
        assert_eq!(io::read_depth(&p).unwrap(), d, "depth round trip {k}");
    }

    // exemplar databases
    for k in 0..100 {
        let records: Vec<Exemplar> = (0..rng.gen_range(0..64))
            .map(|_| random_exemplar(&mut rng))
            .collect();
        let mode = if rng.gen_bool(0.5) {
            SamplingMode::Overlapping
        } else {
            SamplingMode::Disjoint
        };
        let db = ExemplarDb::new(records, vec!["a".into(), "b".into()], mode);
        let p = dir.path().join(format!("{k}.ncdb"));
        io::write_db(&p, &db).unwrap();
        assert_eq!(io::read_db(&p).unwrap(), db, "db round trip {k}");
    }

    // needle maps with partial assignment
    for k in 0..100 {
        let (w, h) = (rng.gen_range(1..16), rng.gen_range(1..16));
        let mut nm = NeedleMap::empty(w, h);
        for i in 0..h {
            for j in 0..w {
                if rng.gen_bool(0.6) {
                    nm.set(
                        i,
                        j,
                        Orientation::new(
                            rng.gen_range(-PI..PI),
                            rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
                        ),
                        rng.gen_range(0.0..=1.0),
                    );
                }
            }
        }
        let p = dir.path().join(format!("{k}.ncnm"));
        io::write_needle_map(&p, &nm).unwrap();
        assert_eq!(
            io::read_needle_map(&p).unwrap(),
            nm,
            "needle map round trip {k}"
        );
    }

    println!("criterion 9 (lossless format round trips): PASS");
}
