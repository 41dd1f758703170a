//! The `pipeline` subcommand: a whole experiment from one config file.
//!
//! Config format: `key = value` lines, `#` comments. Keys:
//!
//! ```text
//! train               comma list of surfaces or depth files (required)
//! test                comma list of surfaces, depth files or images (required)
//! res                 WxH sampling resolution          (default 64x64)
//! mode                overlapping | disjoint           (default overlapping)
//! boundary            truth | silhouette               (default truth)
//! include_center_gray true | false                     (default true)
//! threshold           silhouette foreground threshold  (default 0.05)
//! rim_tilt_cap_deg    tilt cap applied before integrating silhouette
//!                     runs; occluding contours stand at 90 degrees, which
//!                     no height field can represent    (default 80)
//! g, tol, max_iter    integrator overrides             (defaults per grid)
//! ```
//!
//! Unknown keys are rejected before any stage runs. Every data file the run
//! emits is byte-deterministic; the manifest carries the only timestamp.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use needlecast_core::exemplar::{extract_exemplars, DistanceConfig, ExemplarDb, SamplingMode};
use needlecast_core::grid::{DepthMap, NeedleMap, RegionMask};
use needlecast_core::integrate::{integrate, IntegrateError, IntegratorConfig};
use needlecast_core::io;
use needlecast_core::metrics::{avg_min_distance, depth_rmse_aligned, slant_error, EvalReport};
use needlecast_core::solver::{
    boundary_from_silhouette, boundary_from_truth, propagate, PropagateConfig,
};
use needlecast_core::Orientation;

use crate::commands::write_integration;
use crate::error::CliError;
use crate::sources::{parse_res, SourceObject, SURFACE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoundaryMode {
    Truth,
    Silhouette,
}

#[derive(Debug)]
pub struct PipelineConfig {
    train: Vec<String>,
    test: Vec<String>,
    res: (usize, usize),
    mode: SamplingMode,
    boundary: BoundaryMode,
    include_center_gray: bool,
    threshold: f64,
    rim_tilt_cap_deg: f64,
    g: f64,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

impl PipelineConfig {
    /// Reads the key=value file (when given) and applies `key=value`
    /// overrides from the command line on top.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        if let Some(path) = path {
            let body = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            for (lineno, line) in body.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::usage(format!("line {}: expected key=value", lineno + 1))
                })?;
                if kv
                    .insert(k.trim().to_string(), v.trim().to_string())
                    .is_some()
                {
                    return Err(CliError::usage(format!("duplicate key `{}`", k.trim())));
                }
            }
        }
        for item in overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--set `{item}`: expected key=value")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(kv)
    }

    fn from_map(kv: BTreeMap<String, String>) -> Result<Self, CliError> {
        const KNOWN: [&str; 11] = [
            "train",
            "test",
            "res",
            "mode",
            "boundary",
            "include_center_gray",
            "threshold",
            "rim_tilt_cap_deg",
            "g",
            "tol",
            "max_iter",
        ];
        for key in kv.keys() {
            if !KNOWN.contains(&key.as_str()) {
                return Err(CliError::usage(format!("unknown config key `{key}`")));
            }
        }
        let list = |key: &str| -> Result<Vec<String>, CliError> {
            let v = kv
                .get(key)
                .ok_or_else(|| CliError::usage(format!("missing required key `{key}`")))?;
            let items: Vec<String> = v
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if items.is_empty() {
                return Err(CliError::usage(format!("key `{key}` has no entries")));
            }
            Ok(items)
        };

        let cfg = Self {
            train: list("train")?,
            test: list("test")?,
            res: parse_res(kv.get("res").map(String::as_str).unwrap_or("64x64"))?,
            mode: kv
                .get("mode")
                .map(String::as_str)
                .unwrap_or("overlapping")
                .parse()
                .map_err(CliError::Usage)?,
            boundary: match kv.get("boundary").map(String::as_str).unwrap_or("truth") {
                "truth" => BoundaryMode::Truth,
                "silhouette" => BoundaryMode::Silhouette,
                other => return Err(CliError::usage(format!("unknown boundary mode `{other}`"))),
            },
            include_center_gray: match kv
                .get("include_center_gray")
                .map(String::as_str)
                .unwrap_or("true")
            {
                "true" => true,
                "false" => false,
                other => return Err(CliError::usage(format!("include_center_gray `{other}`"))),
            },
            threshold: parse_num(&kv, "threshold", 0.05)?,
            rim_tilt_cap_deg: parse_num(&kv, "rim_tilt_cap_deg", 80.0)?,
            g: parse_num(&kv, "g", 1.0)?,
            tol: kv
                .get("tol")
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| CliError::usage(format!("tol `{v}`")))
                })
                .transpose()?,
            max_iter: kv
                .get("max_iter")
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| CliError::usage(format!("max_iter `{v}`")))
                })
                .transpose()?,
        };
        if !(0.0..90.0).contains(&cfg.rim_tilt_cap_deg) {
            return Err(CliError::usage("rim_tilt_cap_deg must be in [0, 90)"));
        }
        if cfg.g <= 0.0 {
            return Err(CliError::usage("g must be positive"));
        }

        // every referenced path must exist before any stage runs
        for entry in cfg.train.iter().chain(cfg.test.iter()) {
            if !SURFACE_NAMES.contains(&entry.as_str()) && !Path::new(entry).exists() {
                return Err(CliError::usage(format!(
                    "`{entry}` is neither a built-in surface nor an existing file"
                )));
            }
        }
        Ok(cfg)
    }
}

fn parse_num(kv: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, CliError> {
    match kv.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("{key} `{v}` is not a number"))),
    }
}

/// Caps every tilt at the given maximum; silhouette bands stand at 90
/// degrees, which would blow up the gradient field during integration.
fn cap_tilts(nm: &NeedleMap, cap_rad: f64) -> NeedleMap {
    let mut out = NeedleMap::empty(nm.width(), nm.height());
    for i in 0..nm.height() {
        for j in 0..nm.width() {
            if let Some(o) = nm.cell(i, j) {
                let d = nm.distance(i, j).unwrap_or(0.0);
                out.set(i, j, Orientation::new(o.slant(), o.tilt().min(cap_rad)), d);
            }
        }
    }
    out
}

pub fn cmd_pipeline(
    config_path: Option<&Path>,
    overrides: &[String],
    out: &Path,
) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(config_path, overrides)?;
    fs::create_dir_all(out)?;
    fs::create_dir_all(out.join("depths"))?;
    fs::create_dir_all(out.join("renders"))?;
    fs::create_dir_all(out.join("db"))?;

    let mut manifest = String::from("# needlecast pipeline manifest\n");
    // manifest records run-relative paths so identical configs produce
    // identical manifests up to the timestamp
    let rel = |p: &Path| -> String { p.strip_prefix(out).unwrap_or(p).display().to_string() };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(manifest, "timestamp_unix={timestamp}").unwrap();
    if let Some(path) = config_path {
        writeln!(manifest, "config={}", path.display()).unwrap();
    }
    for item in overrides {
        writeln!(manifest, "config_override={item}").unwrap();
    }

    // offline: generate, render, extract
    let mut dbs = Vec::new();
    for entry in &cfg.train {
        let obj = SourceObject::resolve(entry, cfg.res, false)?;
        let angles = obj.angles.as_ref().ok_or_else(|| {
            CliError::usage(format!("training entry `{entry}` must be a depth source"))
        })?;
        if let Some(depth) = &obj.depth {
            let p = out.join("depths").join(format!("{}.zmat", obj.name));
            io::write_depth(&p, depth)?;
            writeln!(manifest, "artifact={}", rel(&p)).unwrap();
        }
        let p = out.join("renders").join(format!("{}.pgm", obj.name));
        io::write_pgm(&p, &obj.image)?;
        writeln!(manifest, "artifact={}", rel(&p)).unwrap();
        let records = extract_exemplars(&obj.image, angles, cfg.mode)?;
        dbs.push(ExemplarDb::from_source(&obj.name, records, cfg.mode));
    }
    let db = ExemplarDb::merge(&dbs)?;
    let db_path = out.join("db").join("examples.ncdb");
    io::write_db(&db_path, &db)?;
    writeln!(manifest, "artifact={}", rel(&db_path)).unwrap();
    writeln!(manifest, "db_records={}", db.len()).unwrap();
    println!(
        "database: {} records from {} sources",
        db.len(),
        db.provenance().len()
    );

    // online: reconstruct, integrate, evaluate each test target
    let distance = DistanceConfig {
        include_center_gray: cfg.include_center_gray,
    };
    for entry in &cfg.test {
        let silhouette = cfg.boundary == BoundaryMode::Silhouette;
        let obj = SourceObject::resolve(entry, cfg.res, silhouette)?;
        let dir = out.join(format!("test-{}", obj.name));
        fs::create_dir_all(&dir)?;

        let (bc, pcfg) = match cfg.boundary {
            BoundaryMode::Truth => {
                let angles = obj.angles.as_ref().ok_or_else(|| {
                    CliError::usage(format!(
                        "test entry `{entry}` needs depth for truth boundaries"
                    ))
                })?;
                let mask = RegionMask::full(obj.image.width(), obj.image.height());
                (
                    boundary_from_truth(angles, &mask)?,
                    PropagateConfig {
                        distance,
                        e_max: Some(1.0),
                    },
                )
            }
            BoundaryMode::Silhouette => (
                boundary_from_silhouette(&obj.image, cfg.threshold)?,
                PropagateConfig {
                    distance,
                    e_max: None,
                },
            ),
        };
        let nm = propagate(&obj.image, &bc, &db, &pcfg)?;
        io::write_needle_map(&dir.join("needle.ncnm"), &nm)?;
        io::render_needle_visualization(&nm, &dir.join("needle_viz.pgm"))?;

        // integration: truth runs pin the border depth; silhouette runs
        // anchor on a flat frame and cap the rim tilts
        let delta = obj.depth.as_ref().map_or(1.0, |d| d.spacing());
        let mut icfg = IntegratorConfig::for_grid(nm.width(), nm.height(), delta);
        icfg.g = cfg.g;
        if let Some(t) = cfg.tol {
            icfg.tol = t;
        } else if let Some(d) = &obj.depth {
            icfg.tol = 1e-6 * d.range().max(1.0);
        }
        if let Some(m) = cfg.max_iter {
            icfg.max_iter = m;
        }
        let to_integrate = match cfg.boundary {
            BoundaryMode::Truth => {
                icfg.boundary_z = obj.depth.clone();
                nm.clone()
            }
            BoundaryMode::Silhouette => {
                icfg.boundary_z =
                    Some(DepthMap::from_fn(nm.width(), nm.height(), delta, |_, _| {
                        0.0
                    }));
                cap_tilts(&nm, cfg.rim_tilt_cap_deg.to_radians())
            }
        };
        let integration = match integrate(&to_integrate, &icfg) {
            Ok(r) => r,
            Err(IntegrateError::NotConverged(partial)) => {
                write_integration(&dir, &partial)?;
                return Err(CliError::NotConverged(format!(
                    "{}: integration stopped at {} iterations (residual {}); partial output in {}",
                    obj.name,
                    partial.iterations,
                    partial.final_residual,
                    dir.display()
                )));
            }
        };
        write_integration(&dir, &integration)?;

        let avg = avg_min_distance(&nm)?;
        let serr = obj
            .angles
            .as_ref()
            .map(|a| slant_error(&nm, a))
            .transpose()?;
        let rmse = obj
            .depth
            .as_ref()
            .map(|t| depth_rmse_aligned(&integration.depth, t))
            .transpose()?;
        let report = EvalReport::new(avg, serr, rmse, nm.assigned_count());
        fs::write(dir.join("report.txt"), report.to_text())?;

        for artifact in [
            "needle.ncnm",
            "needle_viz.pgm",
            "depth.zmat",
            "residuals.txt",
            "report.txt",
        ] {
            writeln!(manifest, "artifact={}", rel(&dir.join(artifact))).unwrap();
        }
        writeln!(manifest, "test_{}_avg_match_distance={avg}", obj.name).unwrap();
        writeln!(
            manifest,
            "test_{}_avg_match_distance_rad={}",
            obj.name, report.avg_match_distance_rad
        )
        .unwrap();
        if let Some(s) = serr {
            writeln!(manifest, "test_{}_mean_abs_slant_error={s}", obj.name).unwrap();
        }
        if let Some(r) = rmse {
            writeln!(manifest, "test_{}_depth_rmse_aligned={r}", obj.name).unwrap();
        }
        writeln!(
            manifest,
            "test_{}_integration_iterations={}",
            obj.name, integration.iterations
        )
        .unwrap();
        println!(
            "test {}: avg_match_distance={avg}{}{}",
            obj.name,
            serr.map(|s| format!(" slant_error={s}"))
                .unwrap_or_default(),
            rmse.map(|r| format!(" depth_rmse={r}")).unwrap_or_default()
        );
    }

    fs::write(out.join("manifest.txt"), &manifest)?;
    println!("manifest -> {}", out.join("manifest.txt").display());
    Ok(())
}
