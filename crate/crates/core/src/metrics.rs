//! Quantitative evaluation of a reconstruction.
//!
//! Boundary pixels are inputs, not predictions, so every average here runs
//! over the solver-assigned pixels only. The boundary band is recovered
//! structurally (assigned cells on the edge of the assigned region), which
//! works identically for in-memory solver output and maps loaded from disk.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::angles::wrap_angle_diff;
use crate::grid::{DepthMap, NeedleMap, OrientationField};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("needle map has no solver-assigned pixels")]
    NoSolvedPixels,
    #[error("grids are {a_w}x{a_h} and {b_w}x{b_h}")]
    DimensionMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
}

fn solved_pixels(nm: &NeedleMap) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..nm.height())
        .flat_map(move |i| (0..nm.width()).map(move |j| (i, j)))
        .filter(move |&(i, j)| nm.is_assigned(i, j) && !nm.is_boundary_cell(i, j))
}

/// Mean match distance over solver-assigned pixels.
pub fn avg_min_distance(nm: &NeedleMap) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, j) in solved_pixels(nm) {
        sum += nm.distance(i, j).expect("assigned cells carry a distance");
        count += 1;
    }
    if count == 0 {
        return Err(MetricsError::NoSolvedPixels);
    }
    Ok(sum / count as f64)
}

/// Mean absolute wrapped slant difference against ground truth, over
/// solver-assigned pixels.
pub fn slant_error(nm: &NeedleMap, truth: &OrientationField) -> Result<f64, MetricsError> {
    if (nm.width(), nm.height()) != (truth.width(), truth.height()) {
        return Err(MetricsError::DimensionMismatch {
            a_w: nm.width(),
            a_h: nm.height(),
            b_w: truth.width(),
            b_h: truth.height(),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, j) in solved_pixels(nm) {
        let slant = nm.cell(i, j).expect("assigned").slant();
        sum += wrap_angle_diff(slant, truth.at(i, j).slant()).abs();
        count += 1;
    }
    if count == 0 {
        return Err(MetricsError::NoSolvedPixels);
    }
    Ok(sum / count as f64)
}

/// Root-mean-square depth error after removing the mean difference, which
/// absorbs the integration constant.
pub fn depth_rmse_aligned(z: &DepthMap, truth: &DepthMap) -> Result<f64, MetricsError> {
    if (z.width(), z.height()) != (truth.width(), truth.height()) {
        return Err(MetricsError::DimensionMismatch {
            a_w: z.width(),
            a_h: z.height(),
            b_w: truth.width(),
            b_h: truth.height(),
        });
    }
    let n = (z.width() * z.height()) as f64;
    let mean: f64 = z
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| a - b)
        .sum::<f64>()
        / n;
    let ss: f64 = z
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| {
            let d = a - b - mean;
            d * d
        })
        .sum();
    Ok((ss / n).sqrt())
}

/// Flat report of the evaluation measures. Truth-dependent fields are absent
/// when no ground truth was supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub avg_match_distance: f64,
    /// Always exactly `avg_match_distance * pi`.
    pub avg_match_distance_rad: f64,
    pub mean_abs_slant_error: Option<f64>,
    pub depth_rmse_aligned: Option<f64>,
    pub pixels_evaluated: usize,
}

impl EvalReport {
    pub fn new(
        avg_match_distance: f64,
        mean_abs_slant_error: Option<f64>,
        depth_rmse_aligned: Option<f64>,
        pixels_evaluated: usize,
    ) -> Self {
        Self {
            avg_match_distance,
            avg_match_distance_rad: avg_match_distance * PI,
            mean_abs_slant_error,
            depth_rmse_aligned,
            pixels_evaluated,
        }
    }

    /// `key=value` text block, one field per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "avg_match_distance={}", self.avg_match_distance).unwrap();
        writeln!(
            out,
            "avg_match_distance_rad={}",
            self.avg_match_distance_rad
        )
        .unwrap();
        if let Some(v) = self.mean_abs_slant_error {
            writeln!(out, "mean_abs_slant_error={v}").unwrap();
        }
        if let Some(v) = self.depth_rmse_aligned {
            writeln!(out, "depth_rmse_aligned={v}").unwrap();
        }
        writeln!(out, "pixels_evaluated={}", self.pixels_evaluated).unwrap();
        out
    }
}
