//! Bundled deterministic demo surfaces.
//!
//! These stand in for object depth matrices (busts, coins, vases) that ship
//! with classic shape-from-shading datasets: closed-form height fields with
//! enough structure to exercise the exemplar database beyond f1/f2/f3.

use crate::grid::{DepthMap, GrayImage};
use crate::render::{render, RenderConfig};

fn sampled(width: usize, height: usize, f: impl Fn(f64, f64) -> f64) -> DepthMap {
    // all gallery surfaces live on [-1, 1]^2
    let dx = 2.0 / (width - 1) as f64;
    let dy = 2.0 / (height - 1) as f64;
    DepthMap::from_fn(width, height, dx, |i, j| {
        f(-1.0 + j as f64 * dx, -1.0 + i as f64 * dy)
    })
}

/// Surface of revolution around a y-parallel axis with a waisted radius
/// profile. The axis sits off-center: a mirror-symmetric body would sample
/// to bit-identical stencils on both flanks, and identical inputs with
/// opposite output slants poison nearest-neighbor ties.
pub fn vase(width: usize, height: usize) -> DepthMap {
    sampled(width, height, |x, y| {
        let r = 0.45 + 0.15 * (std::f64::consts::PI * y).cos();
        let u = x - 0.08;
        (r * r - u * u).max(0.0).sqrt()
    })
}

/// Three overlapping smooth bumps; an irregular, asymmetric relief.
pub fn bumps(width: usize, height: usize) -> DepthMap {
    sampled(width, height, |x, y| {
        let g = |cx: f64, cy: f64, s: f64| {
            let dx = x - cx;
            let dy = y - cy;
            (-(dx * dx + dy * dy) / s).exp()
        };
        0.6 * g(-0.4, -0.3, 0.18) + 0.45 * g(0.45, -0.25, 0.10) + 0.5 * g(0.0, 0.45, 0.22)
    })
}

/// Shallow dome on a disk with an embossed wave pattern, zero outside.
pub fn relief(width: usize, height: usize) -> DepthMap {
    sampled(width, height, |x, y| {
        let r2 = x * x + y * y;
        if r2 <= 0.81 {
            0.2 * (1.0 - r2 / 0.81)
                + 0.03
                    * (5.0 * std::f64::consts::PI * x).sin()
                    * (5.0 * std::f64::consts::PI * y).sin()
        } else {
            0.0
        }
    })
}

/// Radius of the hemisphere produced by [`hemisphere`] in domain units.
pub const HEMISPHERE_RADIUS: f64 = 0.8;

/// Hemisphere of radius [`HEMISPHERE_RADIUS`] on a flat ground plane.
pub fn hemisphere(width: usize, height: usize) -> DepthMap {
    let r2 = HEMISPHERE_RADIUS * HEMISPHERE_RADIUS;
    sampled(width, height, |x, y| (r2 - x * x - y * y).max(0.0).sqrt())
}

/// Frontal rendering of the hemisphere with the ground plane blacked out, a
/// stand-in photograph for silhouette-boundary experiments. Also returns the
/// depth map it was rendered from.
pub fn hemisphere_image(width: usize, height: usize) -> (GrayImage, DepthMap) {
    let depth = hemisphere(width, height);
    let lit = render(&depth, &RenderConfig::default());
    let r2 = HEMISPHERE_RADIUS * HEMISPHERE_RADIUS;
    let dx = 2.0 / (width - 1) as f64;
    let dy = 2.0 / (height - 1) as f64;
    let img = GrayImage::from_fn(width, height, |i, j| {
        let x = -1.0 + j as f64 * dx;
        let y = -1.0 + i as f64 * dy;
        if x * x + y * y < r2 {
            lit.at(i, j)
        } else {
            0.0
        }
    });
    (img, depth)
}
