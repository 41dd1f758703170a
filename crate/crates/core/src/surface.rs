//! Analytic training surfaces and the depth-to-orientation conversion.
//!
//! Grid convention: x varies along columns (j), y along rows (i), and row 0
//! samples y_min. This fixes the sign of every slant produced downstream.

use std::fmt;
use std::str::FromStr;

use crate::angles::Normal;
use crate::grid::{DepthMap, OrientationField};

/// The three closed-form training surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceId {
    /// -x^2 - y^2, a downward paraboloid.
    F1,
    /// x * exp(x^2 - y^2).
    F2,
    /// sin(x) + sin(y).
    F3,
}

impl SurfaceId {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            SurfaceId::F1 => -x * x - y * y,
            SurfaceId::F2 => x * (x * x - y * y).exp(),
            SurfaceId::F3 => x.sin() + y.sin(),
        }
    }

    /// Domain the surface is usually sampled on.
    pub fn default_domain(&self) -> (f64, f64, f64, f64) {
        match self {
            SurfaceId::F1 => (-1.0, 1.0, -1.0, 1.0),
            SurfaceId::F2 => (-2.0, 2.0, -2.0, 2.0),
            SurfaceId::F3 => (-6.0, 6.0, -6.0, 6.0),
        }
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceId::F1 => write!(f, "f1"),
            SurfaceId::F2 => write!(f, "f2"),
            SurfaceId::F3 => write!(f, "f3"),
        }
    }
}

impl FromStr for SurfaceId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f1" => Ok(SurfaceId::F1),
            "f2" => Ok(SurfaceId::F2),
            "f3" => Ok(SurfaceId::F3),
            other => Err(format!("unknown surface `{other}` (expected f1, f2 or f3)")),
        }
    }
}

/// A surface sampled on a uniform grid over a rectangular domain.
#[derive(Clone, Copy, Debug)]
pub struct AnalyticSurface {
    id: SurfaceId,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    width: usize,
    height: usize,
}

impl AnalyticSurface {
    pub fn new(id: SurfaceId, domain: (f64, f64, f64, f64), resolution: (usize, usize)) -> Self {
        let (x_min, x_max, y_min, y_max) = domain;
        let (width, height) = resolution;
        assert!(x_min < x_max && y_min < y_max, "empty domain");
        assert!(width >= 2 && height >= 2, "resolution must be at least 2x2");
        Self {
            id,
            x_min,
            x_max,
            y_min,
            y_max,
            width,
            height,
        }
    }

    /// Surface on its usual domain.
    pub fn with_default_domain(id: SurfaceId, resolution: (usize, usize)) -> Self {
        Self::new(id, id.default_domain(), resolution)
    }

    pub fn id(&self) -> SurfaceId {
        self.id
    }

    /// Samples z[i][j] = f(x_j, y_i). The stored spacing is the x step,
    /// (x_max - x_min) / (width - 1).
    pub fn eval(&self) -> DepthMap {
        let dx = (self.x_max - self.x_min) / (self.width - 1) as f64;
        let dy = (self.y_max - self.y_min) / (self.height - 1) as f64;
        DepthMap::from_fn(self.width, self.height, dx, |i, j| {
            let x = self.x_min + j as f64 * dx;
            let y = self.y_min + i as f64 * dy;
            self.id.eval(x, y)
        })
    }
}

/// Depth gradient at a pixel: central differences in the interior, one-sided
/// at the edges, both divided by the grid spacing.
pub fn gradient_at(d: &DepthMap, i: usize, j: usize) -> (f64, f64) {
    let (w, h) = (d.width(), d.height());
    let s = d.spacing();
    let zx = if j == 0 {
        (d.at(i, 1) - d.at(i, 0)) / s
    } else if j == w - 1 {
        (d.at(i, w - 1) - d.at(i, w - 2)) / s
    } else {
        (d.at(i, j + 1) - d.at(i, j - 1)) / (2.0 * s)
    };
    let zy = if i == 0 {
        (d.at(1, j) - d.at(0, j)) / s
    } else if i == h - 1 {
        (d.at(h - 1, j) - d.at(h - 2, j)) / s
    } else {
        (d.at(i + 1, j) - d.at(i - 1, j)) / (2.0 * s)
    };
    (zx, zy)
}

/// Converts a depth map to per-pixel orientations via the height-field
/// normal of the finite-difference gradient.
pub fn depth_to_angles(d: &DepthMap) -> OrientationField {
    let mut cells = Vec::with_capacity(d.width() * d.height());
    for i in 0..d.height() {
        for j in 0..d.width() {
            let (zx, zy) = gradient_at(d, i, j);
            let o = Normal::from_depth_gradient(zx, zy)
                .orientation()
                .expect("height-field normal always has positive z");
            cells.push(o);
        }
    }
    OrientationField::new(d.width(), d.height(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // 65 samples over [-1, 1] make the step an exact power of two, so the
    // grid hits 0 and +-1 exactly.
    fn f1_65() -> DepthMap {
        AnalyticSurface::with_default_domain(SurfaceId::F1, (65, 65)).eval()
    }

    #[test]
    fn f1_samples_match_the_formula() {
        let d = f1_65();
        assert_eq!(d.spacing(), 2.0 / 64.0);
        assert_eq!(d.at(32, 32), 0.0); // f1(0, 0)
        assert_eq!(d.at(64, 64), -2.0); // f1(1, 1)
        assert_eq!(d.at(0, 0), -2.0); // f1(-1, -1)
    }

    #[test]
    fn f3_and_f2_point_values() {
        assert_abs_diff_eq!(SurfaceId::F3.eval(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(
            SurfaceId::F3.eval(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
            2.0,
            epsilon = 1e-15
        );
        for y in [-2.0, -0.3, 0.0, 1.7] {
            assert_eq!(SurfaceId::F2.eval(0.0, y), 0.0);
        }
    }

    #[test]
    fn surfaces_stay_finite_on_their_domains() {
        for id in [SurfaceId::F1, SurfaceId::F2, SurfaceId::F3] {
            let d = AnalyticSurface::with_default_domain(id, (64, 64)).eval();
            assert!(d.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn constant_depth_has_zero_tilt() {
        let d = DepthMap::from_fn(5, 4, 0.5, |_, _| 7.25);
        let angles = depth_to_angles(&d);
        assert!(angles.cells().iter().all(|o| o.tilt() == 0.0));
    }

    #[test]
    fn f1_center_pixel_is_flat() {
        let angles = depth_to_angles(&f1_65());
        assert_eq!(angles.at(32, 32).tilt(), 0.0);
        assert_eq!(angles.at(32, 32).slant(), 0.0);
    }

    // Central differences on the interior converge at O(spacing^2); checked
    // against the analytic gradient of f2 on [-1, 1]^2.
    #[test]
    fn f2_gradient_matches_analytic_derivative() {
        let max_err = |n: usize| -> f64 {
            let surf = AnalyticSurface::new(SurfaceId::F2, (-1.0, 1.0, -1.0, 1.0), (n, n));
            let d = surf.eval();
            let dx = 2.0 / (n - 1) as f64;
            let mut worst = 0.0f64;
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    let x = -1.0 + j as f64 * dx;
                    let y = -1.0 + i as f64 * dx;
                    let e = (x * x - y * y).exp();
                    let (gx, gy) = gradient_at(&d, i, j);
                    worst = worst.max((gx - e * (1.0 + 2.0 * x * x)).abs());
                    worst = worst.max((gy - e * (-2.0 * x * y)).abs());
                }
            }
            worst
        };
        let coarse = max_err(65);
        let fine = max_err(129);
        assert!(coarse < 0.02, "coarse-grid gradient error {coarse}");
        // halving the step should cut the error roughly 4x
        assert!(coarse / fine > 3.0, "not O(h^2): {coarse} vs {fine}");
    }

    #[test]
    fn linear_ramp_gives_exact_constant_orientation() {
        let (a, b) = (0.75, -0.5);
        let spacing = 0.25;
        let d = DepthMap::from_fn(7, 6, spacing, |i, j| {
            a * (j as f64 * spacing) + b * (i as f64 * spacing)
        });
        let angles = depth_to_angles(&d);
        let expected = Normal::from_depth_gradient(a, b).orientation().unwrap();
        for i in 1..5 {
            for j in 1..6 {
                let o = angles.at(i, j);
                assert_abs_diff_eq!(o.slant(), expected.slant(), epsilon = 1e-9);
                assert_abs_diff_eq!(o.tilt(), expected.tilt(), epsilon = 1e-9);
            }
        }
    }
}
