//! Individual subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use needlecast_core::exemplar::{DistanceConfig, ExemplarDb, SamplingMode};
use needlecast_core::grid::{DepthMap, RegionMask};
use needlecast_core::integrate::{integrate, IntegrateError, IntegrationResult, IntegratorConfig};
use needlecast_core::io;
use needlecast_core::metrics::{avg_min_distance, depth_rmse_aligned, slant_error, EvalReport};
use needlecast_core::render::{render, LightSource, RenderConfig};
use needlecast_core::solver::{
    boundary_from_silhouette, boundary_from_truth, propagate, PropagateConfig,
};
use needlecast_core::surface::{depth_to_angles, AnalyticSurface, SurfaceId};

use crate::error::CliError;
use crate::sources::{builtin_surface, parse_domain, parse_light, parse_res, SourceObject};

pub fn cmd_gen(surface: &str, domain: Option<&str>, res: &str, out: &Path) -> Result<(), CliError> {
    let res = parse_res(res)?;
    let depth = if let Ok(id) = surface.parse::<SurfaceId>() {
        let domain = match domain {
            Some(d) => parse_domain(d)?,
            None => id.default_domain(),
        };
        AnalyticSurface::new(id, domain, res).eval()
    } else {
        if domain.is_some() {
            return Err(CliError::usage(format!(
                "surface `{surface}` has a fixed domain; drop --domain"
            )));
        }
        builtin_surface(surface, res)
            .ok_or_else(|| CliError::usage(format!("unknown surface `{surface}`")))?
    };
    io::write_depth(out, &depth)?;
    println!(
        "wrote {}x{} depth map (spacing {}) to {}",
        depth.width(),
        depth.height(),
        depth.spacing(),
        out.display()
    );
    Ok(())
}

pub fn cmd_render(depth: &Path, light: Option<&str>, out: &Path) -> Result<(), CliError> {
    let d = io::read_depth(depth)?;
    let cfg = match light {
        Some(l) => RenderConfig {
            light: LightSource::new(parse_light(l)?, 1.0)?,
            clamp_negative: true,
        },
        None => RenderConfig::default(),
    };
    let img = render(&d, &cfg);
    io::write_pgm(out, &img)?;
    println!(
        "rendered {}x{} image to {}",
        img.width(),
        img.height(),
        out.display()
    );
    Ok(())
}

pub fn cmd_build_db(depths: &[PathBuf], mode: &str, res: &str, out: &Path) -> Result<(), CliError> {
    let mode: SamplingMode = mode.parse().map_err(CliError::Usage)?;
    let res = parse_res(res)?;
    let mut dbs = Vec::new();
    for path in depths {
        let obj = SourceObject::resolve(&path.to_string_lossy(), res, false)?;
        let angles = obj
            .angles
            .as_ref()
            .ok_or_else(|| CliError::Domain(format!("{}: need a depth source", path.display())))?;
        let records = needlecast_core::exemplar::extract_exemplars(&obj.image, angles, mode)?;
        dbs.push(ExemplarDb::from_source(&obj.name, records, mode));
    }
    let db = ExemplarDb::merge(&dbs)?;
    io::write_db(out, &db)?;
    println!(
        "wrote {} records from {} sources to {}",
        db.len(),
        db.provenance().len(),
        out.display()
    );
    Ok(())
}

pub struct ReconstructArgs<'a> {
    pub db: &'a Path,
    pub depth: Option<&'a Path>,
    pub image: Option<&'a Path>,
    pub boundary: &'a str,
    pub threshold: f64,
    pub exclude_center_gray: bool,
    pub res: &'a str,
    pub out: &'a Path,
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    let db = io::read_db(args.db)?;
    let res = parse_res(args.res)?;
    let obj = match (args.depth, args.image) {
        (Some(d), None) => SourceObject::resolve(&d.to_string_lossy(), res, false)?,
        (None, Some(p)) => SourceObject::resolve(&p.to_string_lossy(), res, false)?,
        _ => return Err(CliError::usage("pass exactly one of --depth or --image")),
    };
    let distance = DistanceConfig {
        include_center_gray: !args.exclude_center_gray,
    };

    let (bc, cfg) = match args.boundary {
        "truth" => {
            let angles = obj.angles.as_ref().ok_or_else(|| {
                CliError::usage("--boundary truth needs a depth source (--depth)")
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
        "silhouette" => (
            boundary_from_silhouette(&obj.image, args.threshold)?,
            PropagateConfig {
                distance,
                e_max: None,
            },
        ),
        other => return Err(CliError::usage(format!("unknown boundary mode `{other}`"))),
    };

    let nm = propagate(&obj.image, &bc, &db, &cfg)?;
    fs::create_dir_all(args.out)?;
    io::write_needle_map(&args.out.join("needle.ncnm"), &nm)?;
    io::render_needle_visualization(&nm, &args.out.join("needle_viz.pgm"))?;

    let avg = avg_min_distance(&nm)?;
    let serr = obj
        .angles
        .as_ref()
        .map(|a| slant_error(&nm, a))
        .transpose()?;
    let report = EvalReport::new(avg, serr, None, nm.assigned_count());
    fs::write(args.out.join("report.txt"), report.to_text())?;
    println!(
        "reconstructed {}: avg_match_distance={avg} ({} pixels) -> {}",
        obj.name,
        nm.assigned_count(),
        args.out.display()
    );
    Ok(())
}

pub struct IntegrateArgs<'a> {
    pub nm: &'a Path,
    pub boundary_z: Option<&'a Path>,
    pub delta: Option<f64>,
    pub g: f64,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: &'a Path,
}

pub fn cmd_integrate(args: &IntegrateArgs) -> Result<(), CliError> {
    let nm = io::read_needle_map(args.nm)?;
    let boundary_z = args.boundary_z.map(io::read_depth).transpose()?;
    let delta = args
        .delta
        .or_else(|| boundary_z.as_ref().map(|b| b.spacing()))
        .unwrap_or(1.0);
    if delta <= 0.0 {
        return Err(CliError::usage(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let mut cfg = IntegratorConfig::for_grid(nm.width(), nm.height(), delta);
    cfg.g = args.g;
    cfg.boundary_z = boundary_z;
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(m) = args.max_iter {
        cfg.max_iter = m;
    }
    if cfg.g <= 0.0 || cfg.tol <= 0.0 || cfg.max_iter == 0 {
        return Err(CliError::usage(
            "g and tol must be positive, max-iter at least 1",
        ));
    }

    fs::create_dir_all(args.out)?;
    match integrate(&nm, &cfg) {
        Ok(result) => {
            write_integration(args.out, &result)?;
            println!(
                "integrated in {} iterations (residual {}) -> {}",
                result.iterations,
                result.final_residual,
                args.out.display()
            );
            Ok(())
        }
        Err(IntegrateError::NotConverged(partial)) => {
            write_integration(args.out, &partial)?;
            Err(CliError::NotConverged(format!(
                "no convergence after {} iterations (residual {}); partial result in {}",
                partial.iterations,
                partial.final_residual,
                args.out.display()
            )))
        }
    }
}

pub fn write_integration(dir: &Path, result: &IntegrationResult) -> Result<(), CliError> {
    io::write_depth(&dir.join("depth.zmat"), &result.depth)?;
    let mut log = String::from("iteration residual\n");
    for (k, r) in result.residuals.iter().enumerate() {
        log.push_str(&format!("{} {r}\n", k + 1));
    }
    fs::write(dir.join("residuals.txt"), log)?;
    Ok(())
}

pub struct EvaluateArgs<'a> {
    pub nm: &'a Path,
    pub truth_depth: Option<&'a Path>,
    pub depth: Option<&'a Path>,
    pub out: &'a Path,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let nm = io::read_needle_map(args.nm)?;
    let truth = args.truth_depth.map(io::read_depth).transpose()?;
    let recon: Option<DepthMap> = args.depth.map(io::read_depth).transpose()?;

    let avg = avg_min_distance(&nm)?;
    let serr = truth
        .as_ref()
        .map(|t| slant_error(&nm, &depth_to_angles(t)))
        .transpose()?;
    let rmse = match (&recon, &truth) {
        (Some(r), Some(t)) => Some(depth_rmse_aligned(r, t)?),
        _ => None,
    };
    let report = EvalReport::new(avg, serr, rmse, nm.assigned_count());
    fs::write(args.out, report.to_text())?;
    print!("{}", report.to_text());
    Ok(())
}
