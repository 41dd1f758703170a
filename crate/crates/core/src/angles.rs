//! Surface orientations as (slant, tilt) pairs and their normal-vector form.
//!
//! Slant is the angle between the X-axis and the projection of the normal
//! onto the image plane; tilt is the angle between the normal and the
//! Z-axis. Every visible surface patch has tilt strictly below pi/2, so a
//! normal produced from an [`Orientation`] always has a positive
//! z-component.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Upper bound on tilt for orientations derived from gradients or contours.
///
/// The integrator divides by cos(tilt); keeping tilt off pi/2 keeps the
/// gradient field finite.
pub const TILT_MAX: f64 = FRAC_PI_2 - 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    /// The normal points away from the camera (z <= 0), so no visible
    /// orientation corresponds to it.
    #[error("normal is not visible (z component {z})")]
    NonVisibleNormal { z: f64 },
}

/// Wraps an angle into (-pi, pi].
///
/// Built on `%` (exact in IEEE arithmetic) plus a Sterbenz-exact correction,
/// so `wrap_angle(-a) == -wrap_angle(a)` whenever the result is interior to
/// the range.
pub fn wrap_angle(a: f64) -> f64 {
    debug_assert!(a.is_finite());
    let r = a % TAU; // (-tau, tau), exact
    if r > PI {
        r - TAU
    } else if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Difference `a - b` wrapped into (-pi, pi]; the signed shorter arc except
/// that antipodal angles map to +pi.
pub fn wrap_angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// Per-pixel surface orientation.
///
/// Invariants: slant in (-pi, pi] (canonically 0 when tilt is 0, where slant
/// is undefined), tilt in [0, [`TILT_MAX`]].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orientation {
    slant: f64,
    tilt: f64,
}

impl Orientation {
    /// Builds an orientation, wrapping the slant and capping the tilt at
    /// [`TILT_MAX`]. Accepts tilt up to and including pi/2; anything outside
    /// [0, pi/2] is a caller bug.
    pub fn new(slant: f64, tilt: f64) -> Self {
        assert!(
            tilt.is_finite() && (0.0..=FRAC_PI_2).contains(&tilt),
            "tilt out of range: {tilt}"
        );
        assert!(slant.is_finite(), "slant must be finite");
        let tilt = tilt.min(TILT_MAX);
        let slant = if tilt == 0.0 { 0.0 } else { wrap_angle(slant) };
        Self { slant, tilt }
    }

    pub fn slant(&self) -> f64 {
        self.slant
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// Unit normal (sin t cos s, sin t sin s, cos t).
    pub fn normal(&self) -> Normal {
        let (ss, cs) = self.slant.sin_cos();
        let (st, ct) = self.tilt.sin_cos();
        Normal {
            x: st * cs,
            y: st * ss,
            z: ct,
        }
    }
}

/// Unit vector perpendicular to the surface at a pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normal {
    x: f64,
    y: f64,
    z: f64,
}

impl Normal {
    /// Normalizes an arbitrary nonzero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let norm = (x * x + y * y + z * z).sqrt();
        assert!(
            norm.is_finite() && norm > 0.0,
            "normal must be a nonzero finite vector"
        );
        Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        }
    }

    /// Normal of a height field with local gradient (zx, zy): the normalized
    /// (-zx, -zy, 1).
    pub fn from_depth_gradient(zx: f64, zy: f64) -> Self {
        assert!(zx.is_finite() && zy.is_finite(), "gradient must be finite");
        Self::new(-zx, -zy, 1.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Normal) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Recovers the (slant, tilt) pair: tilt = arccos(z), slant = atan2(y, x).
    ///
    /// Fails for back-facing or grazing normals (z <= 0). Tilt lands on
    /// [`TILT_MAX`] for nearly-horizontal normals.
    pub fn orientation(&self) -> Result<Orientation, AngleError> {
        if self.z <= 0.0 {
            return Err(AngleError::NonVisibleNormal { z: self.z });
        }
        // acos can round to exactly pi/2 for tiny positive z; Orientation::new
        // caps that back below pi/2.
        let tilt = self.z.clamp(-1.0, 1.0).acos();
        let slant = self.y.atan2(self.x);
        Ok(Orientation::new(slant, tilt))
    }
}
