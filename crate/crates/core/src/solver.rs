//! Online phase: boundary conditions and needle-map propagation.
//!
//! A pixel is ready once the three stencil neighbors (right, below,
//! below-right) carry a known slant. Dependencies therefore point toward
//! increasing row and column, and one anti-raster sweep (rows bottom-up,
//! columns right-to-left) visits every pixel after its dependencies; it is
//! the unique single-pass schedule for this stencil.

use thiserror::Error;

use crate::angles::{wrap_angle, Orientation, TILT_MAX};
use crate::exemplar::{DbError, DistanceConfig, ExemplarDb, Probe};
use crate::grid::{GrayImage, NeedleMap, OrientationField, RegionMask};
use crate::render::{estimate_emax, tilt_from_intensity, RenderError};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("mask has no interior pixels to solve")]
    MissingBorder,
    #[error("image is {img_w}x{img_h} but the boundary condition is {bc_w}x{bc_h}")]
    DimensionMismatch {
        img_w: usize,
        img_h: usize,
        bc_w: usize,
        bc_h: usize,
    },
    #[error("no foreground pixels above the threshold")]
    NoObject,
    #[error("silhouette contour is not closed")]
    OpenContour,
    #[error("{unassigned} pixels could not be reached from the boundary")]
    Starved { unassigned: usize },
    #[error(transparent)]
    Db(#[from] DbError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

/// Orientations pinned on the closed one-pixel band around the region of
/// interest, plus the region mask itself.
///
/// Invariant: every border pixel of the mask carries an orientation. The
/// constructors below enforce it; hand-built bands that violate it surface
/// as [`SolveError::Starved`] during propagation.
#[derive(Clone, Debug)]
pub struct BoundaryCondition {
    mask: RegionMask,
    band: Vec<Option<Orientation>>,
}

impl BoundaryCondition {
    pub fn new(mask: RegionMask, band: Vec<Option<Orientation>>) -> Self {
        assert_eq!(band.len(), mask.width() * mask.height(), "band buffer size");
        Self { mask, band }
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    pub fn mask(&self) -> &RegionMask {
        &self.mask
    }

    pub fn orientation(&self, i: usize, j: usize) -> Option<Orientation> {
        self.band[i * self.mask.width() + j]
    }
}

/// Copies ground-truth orientations onto the border band of the mask.
pub fn boundary_from_truth(
    angles: &OrientationField,
    mask: &RegionMask,
) -> Result<BoundaryCondition, SolveError> {
    if (angles.width(), angles.height()) != (mask.width(), mask.height()) {
        return Err(SolveError::DimensionMismatch {
            img_w: angles.width(),
            img_h: angles.height(),
            bc_w: mask.width(),
            bc_h: mask.height(),
        });
    }
    let (w, h) = (mask.width(), mask.height());
    let mut band = vec![None; w * h];
    let mut border = 0usize;
    for i in 0..h {
        for j in 0..w {
            if mask.is_border(i, j) {
                band[i * w + j] = Some(angles.at(i, j));
                border += 1;
            }
        }
    }
    if mask.count() == border {
        // every masked pixel sits on the band: nothing to solve
        return Err(SolveError::MissingBorder);
    }
    Ok(BoundaryCondition::new(mask.clone(), band))
}

/// Steps walked along the contour on each side when estimating the tangent
/// chord. Longer chords average out pixel quantization; the walk stops early
/// at turns of 90 degrees or more, so straight edges stay exact up to their
/// corners.
const CHORD_STEPS: usize = 3;

/// 4-connected contour pixel: foreground with an edge-adjacent background
/// (or off-grid) neighbor. These carry the tangent chord; pixels that touch
/// the background only diagonally get their normal from the background
/// direction instead.
fn is_contour4(mask: &RegionMask, i: isize, j: isize) -> bool {
    mask.contains(i, j)
        && [(0isize, 1isize), (0, -1), (1, 0), (-1, 0)]
            .iter()
            .any(|&(di, dj)| !mask.contains(i + di, j + dj))
}

/// Derives boundary orientations from the object silhouette: each border
/// pixel gets a slant perpendicular to the local contour tangent, pointing
/// away from the object, with tilt pinned just below pi/2 (the occluding
/// normal lies in the image plane).
///
/// Foreground is intensity strictly above `threshold`.
pub fn boundary_from_silhouette(
    img: &GrayImage,
    threshold: f64,
) -> Result<BoundaryCondition, SolveError> {
    let (w, h) = (img.width(), img.height());
    let mask = RegionMask::from_fn(w, h, |i, j| img.at(i, j) > threshold);
    if mask.count() == 0 {
        return Err(SolveError::NoObject);
    }

    // average offset toward the background around (i, j); the outward
    // reference that disambiguates the two chord perpendiculars
    let background_hint = |i: usize, j: usize| -> (f64, f64) {
        let (mut hx, mut hy) = (0.0f64, 0.0f64);
        for di in -1..=1isize {
            for dj in -1..=1isize {
                if (di, dj) != (0, 0) && !mask.contains(i as isize + di, j as isize + dj) {
                    hx += dj as f64;
                    hy += di as f64;
                }
            }
        }
        (hx, hy)
    };

    // follows the contour from `start` in direction `dir`, preferring the
    // straightest continuation and refusing turns of 90 degrees or more
    // relative to the initial direction; returns the end point
    let walk = |start: (isize, isize), dir: (isize, isize)| -> (isize, isize) {
        let origin = start;
        let mut prev = start;
        let mut cur = (start.0 + dir.0, start.1 + dir.1);
        for _ in 1..CHORD_STEPS {
            let last = ((cur.0 - prev.0) as f64, (cur.1 - prev.1) as f64);
            let mut next: Option<(isize, isize)> = None;
            let mut straightest = f64::NEG_INFINITY;
            for di in -1..=1isize {
                for dj in -1..=1isize {
                    if (di, dj) == (0, 0) {
                        continue;
                    }
                    let cand = (cur.0 + di, cur.1 + dj);
                    if cand == prev || cand == origin || !is_contour4(&mask, cand.0, cand.1) {
                        continue;
                    }
                    if (di * dir.0 + dj * dir.1) <= 0 {
                        continue; // turned away from the initial direction
                    }
                    let norm = ((di * di + dj * dj) as f64).sqrt();
                    let score = (di as f64 * last.0 + dj as f64 * last.1) / norm;
                    if score > straightest {
                        straightest = score;
                        next = Some(cand);
                    }
                }
            }
            match next {
                Some(n) => {
                    prev = cur;
                    cur = n;
                }
                None => break,
            }
        }
        cur
    };

    let mut band = vec![None; w * h];
    for i in 0..h {
        for j in 0..w {
            if !mask.is_border(i, j) {
                continue;
            }
            let (hx, hy) = background_hint(i, j);
            let (tx, ty) = if is_contour4(&mask, i as isize, j as isize) {
                // branch directions: the two most opposed contour neighbors
                let mut nbrs: Vec<(isize, isize)> = Vec::new();
                for di in -1..=1isize {
                    for dj in -1..=1isize {
                        if (di, dj) != (0, 0)
                            && is_contour4(&mask, i as isize + di, j as isize + dj)
                        {
                            nbrs.push((di, dj));
                        }
                    }
                }
                if nbrs.len() < 2 {
                    return Err(SolveError::OpenContour);
                }
                let (mut pa, mut pb, mut best_cos) =
                    ((0isize, 0isize), (0isize, 0isize), f64::INFINITY);
                for x in 0..nbrs.len() {
                    for y in x + 1..nbrs.len() {
                        let (ai, aj) = nbrs[x];
                        let (bi, bj) = nbrs[y];
                        let cos = ((ai * bi + aj * bj) as f64)
                            / (((ai * ai + aj * aj) as f64).sqrt()
                                * ((bi * bi + bj * bj) as f64).sqrt());
                        if cos < best_cos {
                            best_cos = cos;
                            pa = nbrs[x];
                            pb = nbrs[y];
                        }
                    }
                }
                if best_cos > 1e-9 {
                    // both branches leave on the same side: an endpoint
                    return Err(SolveError::OpenContour);
                }
                let here = (i as isize, j as isize);
                let a = walk(here, pa);
                let b = walk(here, pb);
                if a == b {
                    return Err(SolveError::OpenContour);
                }
                ((b.1 - a.1) as f64, (b.0 - a.0) as f64)
            } else {
                // background touches only at a diagonal: the hint itself is
                // the outward normal; encode it as the chord perpendicular
                (-hy, hx)
            };
            let (mut nx, mut ny) = (ty, -tx);
            if nx * hx + ny * hy < 0.0 {
                nx = -nx;
                ny = -ny;
            }
            let slant = wrap_angle(ny.atan2(nx));
            band[i * w + j] = Some(Orientation::new(slant, TILT_MAX));
        }
    }

    Ok(BoundaryCondition::new(mask, band))
}

/// Propagation options.
#[derive(Clone, Copy, Debug, Default)]
pub struct PropagateConfig {
    pub distance: DistanceConfig,
    /// Reference maximum intensity for tilt recovery. `None` estimates it as
    /// the maximum over the mask; synthetic renders should pass 1.0.
    pub e_max: Option<f64>,
}

impl PropagateConfig {
    /// Configuration for images rendered in normalized units (e_max = 1).
    pub fn synthetic() -> Self {
        Self {
            distance: DistanceConfig::default(),
            e_max: Some(1.0),
        }
    }
}

/// Recovers the needle map over the masked region: boundary pixels are
/// copied from the condition (distance 0), every other masked pixel gets its
/// slant from the nearest database record and its tilt from its own
/// intensity.
pub fn propagate(
    img: &GrayImage,
    bc: &BoundaryCondition,
    db: &ExemplarDb,
    cfg: &PropagateConfig,
) -> Result<NeedleMap, SolveError> {
    let (w, h) = (img.width(), img.height());
    if (w, h) != (bc.width(), bc.height()) {
        return Err(SolveError::DimensionMismatch {
            img_w: w,
            img_h: h,
            bc_w: bc.width(),
            bc_h: bc.height(),
        });
    }
    if db.is_empty() {
        return Err(SolveError::Db(DbError::EmptyDb));
    }
    let e_max = match cfg.e_max {
        Some(v) => v,
        None => estimate_emax(img, Some(bc.mask()))?,
    };

    let mut nm = NeedleMap::empty(w, h);
    for i in 0..h {
        for j in 0..w {
            if let Some(o) = bc.orientation(i, j) {
                nm.set(i, j, o, 0.0);
            }
        }
    }

    // anti-raster sweep: every stencil dependency is visited first
    for i in (0..h).rev() {
        for j in (0..w).rev() {
            if !bc.mask().contains(i as isize, j as isize) || nm.is_assigned(i, j) {
                continue;
            }
            if i + 1 >= h || j + 1 >= w {
                continue;
            }
            let ready = nm.is_assigned(i, j + 1)
                && nm.is_assigned(i + 1, j)
                && nm.is_assigned(i + 1, j + 1);
            if !ready {
                continue;
            }
            let probe = Probe::new(
                img.at(i, j),
                [img.at(i, j + 1), img.at(i + 1, j), img.at(i + 1, j + 1)],
                [
                    nm.cell(i, j + 1).unwrap().slant(),
                    nm.cell(i + 1, j).unwrap().slant(),
                    nm.cell(i + 1, j + 1).unwrap().slant(),
                ],
            );
            let found = db.nearest(&probe, &cfg.distance)?;
            let slant = db.records()[found.index].s_out;
            let tilt = tilt_from_intensity(img.at(i, j), e_max)?;
            nm.set(i, j, Orientation::new(slant, tilt), found.distance);
        }
    }

    let unassigned = bc.mask().count()
        - (0..h)
            .flat_map(|i| (0..w).map(move |j| (i, j)))
            .filter(|&(i, j)| bc.mask().contains(i as isize, j as isize) && nm.is_assigned(i, j))
            .count();
    if unassigned > 0 {
        return Err(SolveError::Starved { unassigned });
    }
    Ok(nm)
}
