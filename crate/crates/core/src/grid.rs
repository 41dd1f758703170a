//! Row-major raster containers shared by every pipeline stage.
//!
//! Pixel (i, j) means row i, column j. Row 0 corresponds to the smallest y
//! of the sampled domain, so the +y direction is the +i direction.

use crate::angles::Orientation;

/// Normalized gray-level image with intensities in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    intensities: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, intensities: Vec<f64>) -> Self {
        assert_eq!(intensities.len(), width * height, "intensity buffer size");
        assert!(
            intensities.iter().all(|v| (0.0..=1.0).contains(v)),
            "intensities must lie in [0, 1]"
        );
        Self {
            width,
            height,
            intensities,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut intensities = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                intensities.push(f(i, j));
            }
        }
        Self::new(width, height, intensities)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.intensities[i * self.width + j]
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }
}

/// Per-pixel height field. `spacing` is the scene-unit step between adjacent
/// samples and travels with the data so gradients and integration agree.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    spacing: f64,
    z: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, spacing: f64, z: Vec<f64>) -> Self {
        assert_eq!(z.len(), width * height, "depth buffer size");
        assert!(
            spacing.is_finite() && spacing > 0.0,
            "spacing must be positive"
        );
        debug_assert!(
            z.iter().all(|v| v.is_finite()),
            "depth values must be finite"
        );
        Self {
            width,
            height,
            spacing,
            z,
        }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        spacing: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut z = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                z.push(f(i, j));
            }
        }
        Self::new(width, height, spacing, z)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.width + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    /// max(z) - min(z); 0 for a constant map.
    pub fn range(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.z {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }
}

/// Dense grid of orientations, the ground-truth counterpart of a needle map.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientationField {
    width: usize,
    height: usize,
    cells: Vec<Orientation>,
}

impl OrientationField {
    pub fn new(width: usize, height: usize, cells: Vec<Orientation>) -> Self {
        assert_eq!(cells.len(), width * height, "orientation buffer size");
        Self {
            width,
            height,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn at(&self, i: usize, j: usize) -> Orientation {
        self.cells[i * self.width + j]
    }

    pub fn cells(&self) -> &[Orientation] {
        &self.cells
    }
}

/// Boolean region-of-interest mask.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    width: usize,
    height: usize,
    inside: Vec<bool>,
}

impl RegionMask {
    pub fn new(width: usize, height: usize, inside: Vec<bool>) -> Self {
        assert_eq!(inside.len(), width * height, "mask buffer size");
        Self {
            width,
            height,
            inside,
        }
    }

    /// Mask covering the whole grid.
    pub fn full(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut inside = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                inside.push(f(i, j));
            }
        }
        Self::new(width, height, inside)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// True for in-bounds masked pixels; out-of-bounds queries are false.
    pub fn contains(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.height
            && (j as usize) < self.width
            && self.inside[i as usize * self.width + j as usize]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Border pixel: masked, with at least one 8-neighbor (or off-grid
    /// position) outside the mask. These form the closed one-pixel band the
    /// boundary condition lives on.
    pub fn is_border(&self, i: usize, j: usize) -> bool {
        if !self.contains(i as isize, j as isize) {
            return false;
        }
        for di in -1..=1isize {
            for dj in -1..=1isize {
                if (di, dj) != (0, 0) && !self.contains(i as isize + di, j as isize + dj) {
                    return true;
                }
            }
        }
        false
    }
}

/// Grid of recovered orientations plus, per assigned pixel, the distance to
/// the exemplar that supplied its slant. Boundary pixels carry distance 0.
#[derive(Clone, Debug, PartialEq)]
pub struct NeedleMap {
    width: usize,
    height: usize,
    cells: Vec<Option<Orientation>>,
    match_distance: Vec<Option<f64>>,
}

impl NeedleMap {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![None; width * height],
            match_distance: vec![None; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Assigns a cell; orientation and match distance are always set
    /// together.
    pub fn set(&mut self, i: usize, j: usize, orientation: Orientation, distance: f64) {
        assert!(
            (0.0..=1.0).contains(&distance),
            "match distance out of [0, 1]: {distance}"
        );
        let idx = i * self.width + j;
        self.cells[idx] = Some(orientation);
        self.match_distance[idx] = Some(distance);
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<Orientation> {
        self.cells[i * self.width + j]
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        self.match_distance[i * self.width + j]
    }

    pub fn is_assigned(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.width + j].is_some()
    }

    pub fn assigned_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// True when the cell sits on the edge of the assigned region: assigned,
    /// with an 8-neighbor (or off-grid position) that is unassigned. On a
    /// solver product this reproduces exactly the boundary-condition band,
    /// so it also recovers the band from a map loaded from disk.
    pub fn is_boundary_cell(&self, i: usize, j: usize) -> bool {
        if !self.is_assigned(i, j) {
            return false;
        }
        for di in -1..=1isize {
            for dj in -1..=1isize {
                if (di, dj) == (0, 0) {
                    continue;
                }
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if ni < 0
                    || nj < 0
                    || ni as usize >= self.height
                    || nj as usize >= self.width
                    || !self.is_assigned(ni as usize, nj as usize)
                {
                    return true;
                }
            }
        }
        false
    }
}
