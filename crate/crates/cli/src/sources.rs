//! Shared loading of training/test objects: built-in surface names or
//! depth-matrix / PGM files on disk.

use std::path::Path;

use needlecast_core::gallery;
use needlecast_core::grid::{DepthMap, GrayImage, OrientationField};
use needlecast_core::io;
use needlecast_core::render::{render, RenderConfig};
use needlecast_core::surface::{depth_to_angles, AnalyticSurface, SurfaceId};

use crate::error::CliError;

pub const SURFACE_NAMES: [&str; 7] = ["f1", "f2", "f3", "vase", "bumps", "relief", "hemisphere"];

/// Depth map for a built-in surface name, or None if the name is unknown.
pub fn builtin_surface(name: &str, res: (usize, usize)) -> Option<DepthMap> {
    let (w, h) = res;
    match name {
        "f1" | "f2" | "f3" => {
            let id: SurfaceId = name.parse().ok()?;
            Some(AnalyticSurface::with_default_domain(id, res).eval())
        }
        "vase" => Some(gallery::vase(w, h)),
        "bumps" => Some(gallery::bumps(w, h)),
        "relief" => Some(gallery::relief(w, h)),
        "hemisphere" => Some(gallery::hemisphere(w, h)),
        _ => None,
    }
}

/// A loaded object: always an image, plus depth/orientations when known.
pub struct SourceObject {
    pub name: String,
    pub depth: Option<DepthMap>,
    pub angles: Option<OrientationField>,
    pub image: GrayImage,
}

impl SourceObject {
    pub fn from_depth(name: &str, depth: DepthMap) -> Self {
        let angles = depth_to_angles(&depth);
        let image = render(&depth, &RenderConfig::default());
        Self {
            name: name.to_string(),
            depth: Some(depth),
            angles: Some(angles),
            image,
        }
    }

    /// Resolves a train/test entry: a built-in surface name, a `.pgm` image
    /// path, or a depth-matrix path. `silhouette_target` swaps the
    /// hemisphere's rendering for its dark-background variant so the object
    /// stands out from the ground plane.
    pub fn resolve(
        entry: &str,
        res: (usize, usize),
        silhouette_target: bool,
    ) -> Result<Self, CliError> {
        if entry == "hemisphere" && silhouette_target {
            let (image, depth) = gallery::hemisphere_image(res.0, res.1);
            let angles = depth_to_angles(&depth);
            return Ok(Self {
                name: entry.to_string(),
                depth: Some(depth),
                angles: Some(angles),
                image,
            });
        }
        if let Some(depth) = builtin_surface(entry, res) {
            return Ok(Self::from_depth(entry, depth));
        }
        let path = Path::new(entry);
        if !path.exists() {
            return Err(CliError::usage(format!(
                "`{entry}` is neither a built-in surface ({}) nor an existing file",
                SURFACE_NAMES.join(", ")
            )));
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| entry.to_string());
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        {
            let image = io::read_pgm(path)?;
            Ok(Self {
                name,
                depth: None,
                angles: None,
                image,
            })
        } else {
            Ok(Self::from_depth(&name, io::read_depth(path)?))
        }
    }
}

pub fn parse_res(s: &str) -> Result<(usize, usize), CliError> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| CliError::usage(format!("resolution `{s}` is not WxH")))?;
    let w: usize = w
        .parse()
        .map_err(|_| CliError::usage(format!("bad width `{w}`")))?;
    let h: usize = h
        .parse()
        .map_err(|_| CliError::usage(format!("bad height `{h}`")))?;
    if w < 2 || h < 2 {
        return Err(CliError::usage("resolution must be at least 2x2"));
    }
    Ok((w, h))
}

pub fn parse_domain(s: &str) -> Result<(f64, f64, f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!(
            "domain `{s}` is not x_min,x_max,y_min,y_max"
        )));
    }
    let mut v = [0.0f64; 4];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad domain component `{p}`")))?;
        if !v[k].is_finite() {
            return Err(CliError::usage(format!(
                "domain component `{p}` not finite"
            )));
        }
    }
    if v[0] >= v[1] || v[2] >= v[3] {
        return Err(CliError::usage(format!("domain `{s}` is empty")));
    }
    Ok((v[0], v[1], v[2], v[3]))
}

pub fn parse_light(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!("light `{s}` is not x,y,z")));
    }
    let mut v = [0.0f64; 3];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad light component `{p}`")))?;
    }
    Ok(v)
}
