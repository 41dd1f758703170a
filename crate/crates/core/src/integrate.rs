//! Depth reconstruction from a needle map by iterative relaxation.
//!
//! Each sweep replaces every interior depth with the average of its four
//! neighbors minus a source term built from central differences of the
//! gradient field (p, q):
//!
//! ```text
//! z[i][j] <- (z[i+1][j] + z[i][j+1] + z[i-1][j] + z[i][j-1]) / 4
//!            - delta / (8 g) * (p[i][j+1] - p[i][j-1] + q[i+1][j] - q[i-1][j])
//! ```
//!
//! p is differenced along x (columns) and q along y (rows). All pixels of a
//! sweep read the previous grid, so sweeps are deterministic and the scheme
//! is the Jacobi form of the relaxation. Without a Dirichlet border the
//! result is defined only up to an additive constant.

use thiserror::Error;

use crate::angles::Orientation;
use crate::grid::{DepthMap, NeedleMap};

/// Gradient-space representation of an orientation:
/// (sin t cos s / cos t, sin t sin s / cos t) = tan(t) * (cos s, sin s).
///
/// This is (Nx/Nz, Ny/Nz), i.e. minus the depth gradient of the height
/// field the normal came from.
pub fn pq_from_angles(o: &Orientation) -> (f64, f64) {
    let t = o.tilt().tan();
    (t * o.slant().cos(), t * o.slant().sin())
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    /// Grid spacing in scene units.
    pub delta: f64,
    /// Scheme constant; 1 gives the plain relaxation update.
    pub g: f64,
    /// Convergence threshold on the max per-sweep depth change.
    pub tol: f64,
    pub max_iter: usize,
    /// Known depth on the border (Dirichlet). When absent the border
    /// replicates its interior neighbor after every sweep, leaving the
    /// solution determined up to a constant.
    pub boundary_z: Option<DepthMap>,
}

impl IntegratorConfig {
    /// Defaults sized for a needle map of the given dimensions.
    pub fn for_grid(width: usize, height: usize, delta: f64) -> Self {
        let n = width.max(height);
        Self {
            delta,
            g: 1.0,
            tol: 1e-6,
            max_iter: 50 * n * n,
            boundary_z: None,
        }
    }

    fn validate(&self, width: usize, height: usize) {
        assert!(self.delta > 0.0, "delta must be positive");
        assert!(self.g > 0.0, "g must be positive");
        assert!(self.tol > 0.0, "tol must be positive");
        assert!(self.max_iter >= 1, "max_iter must be at least 1");
        if let Some(b) = &self.boundary_z {
            assert_eq!(
                (b.width(), b.height()),
                (width, height),
                "boundary_z dimensions"
            );
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegrationResult {
    pub depth: DepthMap,
    pub iterations: usize,
    pub final_residual: f64,
    /// Max per-pixel change of every sweep, in order.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    /// Hit the iteration cap; carries the partial reconstruction.
    #[error("no convergence after {} iterations (residual {})",
            .0.iterations, .0.final_residual)]
    NotConverged(Box<IntegrationResult>),
}

/// Integrates the needle map into a depth map. Cells without an orientation
/// contribute a zero gradient.
///
/// The sign convention: `pq_from_angles` yields minus the depth gradient, so
/// the integrator negates it to drive z toward the surface the normals came
/// from rather than its concave/convex dual.
pub fn integrate(
    nm: &NeedleMap,
    cfg: &IntegratorConfig,
) -> Result<IntegrationResult, IntegrateError> {
    let (w, h) = (nm.width(), nm.height());
    cfg.validate(w, h);

    let mut p = vec![0.0f64; w * h];
    let mut q = vec![0.0f64; w * h];
    for i in 0..h {
        for j in 0..w {
            if let Some(o) = nm.cell(i, j) {
                let (pv, qv) = pq_from_angles(&o);
                p[i * w + j] = -pv;
                q[i * w + j] = -qv;
            }
        }
    }

    let mut z = vec![0.0f64; w * h];
    if let Some(b) = &cfg.boundary_z {
        for i in 0..h {
            for j in 0..w {
                if i == 0 || i == h - 1 || j == 0 || j == w - 1 {
                    z[i * w + j] = b.at(i, j);
                }
            }
        }
    }

    let coeff = cfg.delta / (8.0 * cfg.g);
    let mut residuals = Vec::new();
    let mut next = z.clone();
    for sweep in 1..=cfg.max_iter {
        for i in 1..h.saturating_sub(1) {
            for j in 1..w - 1 {
                let idx = i * w + j;
                let avg = (z[idx + w] + z[idx + 1] + z[idx - w] + z[idx - 1]) / 4.0;
                let src = p[idx + 1] - p[idx - 1] + q[idx + w] - q[idx - w];
                next[idx] = avg - coeff * src;
            }
        }
        if cfg.boundary_z.is_none() && w > 2 && h > 2 {
            for j in 1..w - 1 {
                next[j] = next[w + j];
                next[(h - 1) * w + j] = next[(h - 2) * w + j];
            }
            for i in 1..h - 1 {
                next[i * w] = next[i * w + 1];
                next[i * w + w - 1] = next[i * w + w - 2];
            }
            next[0] = next[w + 1];
            next[w - 1] = next[2 * w - 2];
            next[(h - 1) * w] = next[(h - 2) * w + 1];
            next[h * w - 1] = next[(h - 1) * w - 2];
        }

        let mut residual = 0.0f64;
        for idx in 0..w * h {
            residual = residual.max((next[idx] - z[idx]).abs());
        }
        std::mem::swap(&mut z, &mut next);
        residuals.push(residual);

        if residual < cfg.tol {
            return Ok(IntegrationResult {
                depth: DepthMap::new(w, h, cfg.delta, z),
                iterations: sweep,
                final_residual: residual,
                residuals,
            });
        }
    }

    let final_residual = residuals.last().copied().unwrap_or(0.0);
    Err(IntegrateError::NotConverged(Box::new(IntegrationResult {
        depth: DepthMap::new(w, h, cfg.delta, z),
        iterations: cfg.max_iter,
        final_residual,
        residuals,
    })))
}
