//! The example database: offline extraction of gray-level/slant stencils and
//! exact nearest-neighbor queries under a normalized distance.
//!
//! Each record pairs the gray level of a pixel and of its three stencil
//! neighbors (right, below, below-right in that frozen order) plus those
//! neighbors' slants, with the pixel's own slant as the output. Queries scan
//! the whole database; the exhaustive scan is the normative semantics and
//! tie-breaking is by lowest record index.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::angles::{wrap_angle, wrap_angle_diff};
use crate::grid::{GrayImage, OrientationField};

#[derive(Debug, Error, PartialEq)]
pub enum DbError {
    #[error("stencil extraction needs at least a 2x2 grid (got {width}x{height})")]
    TooSmall { width: usize, height: usize },
    #[error("image is {img_w}x{img_h} but orientations are {ang_w}x{ang_h}")]
    DimensionMismatch {
        img_w: usize,
        img_h: usize,
        ang_w: usize,
        ang_h: usize,
    },
    #[error("query against an empty database")]
    EmptyDb,
    #[error("cannot merge databases with different sampling modes")]
    MixedMode,
}

/// How stencil origins are placed during extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Every placement: (width-1)*(height-1) records.
    Overlapping,
    /// Origins on even rows and columns only.
    Disjoint,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Overlapping => write!(f, "overlapping"),
            SamplingMode::Disjoint => write!(f, "disjoint"),
        }
    }
}

impl FromStr for SamplingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "overlapping" => Ok(SamplingMode::Overlapping),
            "disjoint" => Ok(SamplingMode::Disjoint),
            other => Err(format!("unknown sampling mode `{other}`")),
        }
    }
}

/// One training record. Neighbor order is fixed: (i, j+1), (i+1, j),
/// (i+1, j+1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exemplar {
    pub g_center: f64,
    pub g_nbr: [f64; 3],
    pub s_nbr: [f64; 3],
    pub s_out: f64,
}

impl Exemplar {
    pub fn new(g_center: f64, g_nbr: [f64; 3], s_nbr: [f64; 3], s_out: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&g_center) && g_nbr.iter().all(|g| (0.0..=1.0).contains(g)),
            "gray levels must lie in [0, 1]"
        );
        Self {
            g_center,
            g_nbr,
            s_nbr: s_nbr.map(wrap_angle),
            s_out: wrap_angle(s_out),
        }
    }
}

/// Query stencil: the inputs of an [`Exemplar`] without the output slant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub g_center: f64,
    pub g_nbr: [f64; 3],
    pub s_nbr: [f64; 3],
}

impl Probe {
    pub fn new(g_center: f64, g_nbr: [f64; 3], s_nbr: [f64; 3]) -> Self {
        assert!(
            (0.0..=1.0).contains(&g_center) && g_nbr.iter().all(|g| (0.0..=1.0).contains(g)),
            "gray levels must lie in [0, 1]"
        );
        Self {
            g_center,
            g_nbr,
            s_nbr: s_nbr.map(wrap_angle),
        }
    }
}

/// Distance options. Gray levels already live in [0, 1]; slant differences
/// are wrapped and divided by pi, and the root-mean-square of the components
/// keeps the whole distance in [0, 1].
#[derive(Clone, Copy, Debug)]
pub struct DistanceConfig {
    /// Compare the center gray level too (7 components instead of 6).
    pub include_center_gray: bool,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            include_center_gray: true,
        }
    }
}

/// Normalized distance between a probe and a record's inputs, in [0, 1].
pub fn distance(p: &Probe, e: &Exemplar, cfg: &DistanceConfig) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    if cfg.include_center_gray {
        let d = p.g_center - e.g_center;
        sum += d * d;
        n += 1;
    }
    for k in 0..3 {
        let d = p.g_nbr[k] - e.g_nbr[k];
        sum += d * d;
        n += 1;
    }
    for k in 0..3 {
        let d = wrap_angle_diff(p.s_nbr[k], e.s_nbr[k]).abs() / PI;
        sum += d * d;
        n += 1;
    }
    (sum / n as f64).sqrt()
}

/// Result of a nearest-neighbor query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Ordered collection of exemplars with the names of the objects they came
/// from. Immutable once built; queries need no synchronization.
#[derive(Clone, Debug, PartialEq)]
pub struct ExemplarDb {
    records: Vec<Exemplar>,
    provenance: Vec<String>,
    mode: SamplingMode,
}

impl ExemplarDb {
    pub fn new(records: Vec<Exemplar>, provenance: Vec<String>, mode: SamplingMode) -> Self {
        Self {
            records,
            provenance,
            mode,
        }
    }

    /// Database holding one object's records.
    pub fn from_source(name: &str, records: Vec<Exemplar>, mode: SamplingMode) -> Self {
        Self::new(records, vec![name.to_string()], mode)
    }

    pub fn records(&self) -> &[Exemplar] {
        &self.records
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Exhaustive scan for the record with minimal distance to the probe.
    /// Ties keep the lowest index.
    pub fn nearest(&self, p: &Probe, cfg: &DistanceConfig) -> Result<Neighbor, DbError> {
        if self.records.is_empty() {
            return Err(DbError::EmptyDb);
        }
        let mut best = Neighbor {
            index: 0,
            distance: distance(p, &self.records[0], cfg),
        };
        for (index, e) in self.records.iter().enumerate().skip(1) {
            let d = distance(p, e, cfg);
            if d < best.distance {
                best = Neighbor { index, distance: d };
            }
        }
        Ok(best)
    }

    /// Concatenates databases in argument order; provenance is the union in
    /// first-seen order.
    pub fn merge(dbs: &[ExemplarDb]) -> Result<ExemplarDb, DbError> {
        let first = dbs.first().ok_or(DbError::EmptyDb)?;
        let mode = first.mode;
        if dbs.iter().any(|db| db.mode != mode) {
            return Err(DbError::MixedMode);
        }
        let mut records = Vec::with_capacity(dbs.iter().map(|db| db.len()).sum());
        let mut provenance: Vec<String> = Vec::new();
        for db in dbs {
            records.extend_from_slice(&db.records);
            for name in &db.provenance {
                if !provenance.contains(name) {
                    provenance.push(name.clone());
                }
            }
        }
        Ok(ExemplarDb::new(records, provenance, mode))
    }
}

/// Extracts one record per stencil placement from a rendered image and its
/// orientations. Overlapping mode visits every origin; disjoint mode only
/// even rows and columns.
pub fn extract_exemplars(
    img: &GrayImage,
    angles: &OrientationField,
    mode: SamplingMode,
) -> Result<Vec<Exemplar>, DbError> {
    let (w, h) = (img.width(), img.height());
    if (w, h) != (angles.width(), angles.height()) {
        return Err(DbError::DimensionMismatch {
            img_w: w,
            img_h: h,
            ang_w: angles.width(),
            ang_h: angles.height(),
        });
    }
    if w < 2 || h < 2 {
        return Err(DbError::TooSmall {
            width: w,
            height: h,
        });
    }
    let step = match mode {
        SamplingMode::Overlapping => 1,
        SamplingMode::Disjoint => 2,
    };
    let mut records = Vec::new();
    let mut i = 0;
    while i <= h - 2 {
        let mut j = 0;
        while j <= w - 2 {
            records.push(Exemplar::new(
                img.at(i, j),
                [img.at(i, j + 1), img.at(i + 1, j), img.at(i + 1, j + 1)],
                [
                    angles.at(i, j + 1).slant(),
                    angles.at(i + 1, j).slant(),
                    angles.at(i + 1, j + 1).slant(),
                ],
                angles.at(i, j).slant(),
            ));
            j += step;
        }
        i += step;
    }
    Ok(records)
}
