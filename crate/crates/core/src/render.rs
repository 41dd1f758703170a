//! Lambertian shading under a distant light and the inverse map from
//! intensity back to tilt.
//!
//! Intensities are stored pre-divided by the shading constant K, so the
//! recorded value is cos(alpha) for the angle alpha between normal and
//! light. At the singular point (normal aligned with the light) the
//! intensity is exactly 1.

use thiserror::Error;

use crate::angles::Normal;
use crate::grid::{DepthMap, GrayImage, RegionMask};
use crate::surface::depth_to_angles;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    /// Light direction was zero-length or the maximum illuminance was not
    /// positive.
    #[error("invalid light source")]
    InvalidLight,
    /// Tilt recovery needs a positive reference maximum.
    #[error("reference maximum intensity must be positive (got {0})")]
    InvalidMax(f64),
    /// No positive intensity available to estimate the maximum from.
    #[error("image region is entirely dark")]
    AllDark,
}

/// Distant light: a unit direction toward the source and the maximum
/// illuminance K it produces on a facing patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightSource {
    direction: Normal,
    k_max: f64,
}

impl LightSource {
    pub fn new(direction: [f64; 3], k_max: f64) -> Result<Self, RenderError> {
        let [x, y, z] = direction;
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) || !(k_max.is_finite() && k_max > 0.0) {
            return Err(RenderError::InvalidLight);
        }
        Ok(Self {
            direction: Normal::new(x, y, z),
            k_max,
        })
    }

    /// Light along +Z with unit illuminance, the direction the whole
    /// tilt-from-intensity identity relies on.
    pub fn frontal() -> Self {
        Self {
            direction: Normal::new(0.0, 0.0, 1.0),
            k_max: 1.0,
        }
    }

    pub fn direction(&self) -> Normal {
        self.direction
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RenderConfig {
    pub light: LightSource,
    /// Clip attached shadows (negative incidence) to zero.
    pub clamp_negative: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            light: LightSource::frontal(),
            clamp_negative: true,
        }
    }
}

/// Normalized Lambertian intensity of a patch: cos of the angle between the
/// normal and the light, clipped at zero when `clamp_negative` is set.
pub fn shade(n: &Normal, cfg: &RenderConfig) -> f64 {
    let cos_alpha = n.dot(&cfg.light.direction());
    if cfg.clamp_negative {
        cos_alpha.max(0.0)
    } else {
        cos_alpha
    }
}

/// Renders a depth map to a gray image: gradient, normal, shade per pixel.
/// Output values are clamped into [0, 1].
pub fn render(d: &DepthMap, cfg: &RenderConfig) -> GrayImage {
    let angles = depth_to_angles(d);
    GrayImage::from_fn(d.width(), d.height(), |i, j| {
        shade(&angles.at(i, j).normal(), cfg).clamp(0.0, 1.0)
    })
}

/// Recovers tilt from intensity: arccos of e / e_max, clamped into [0, 1].
/// Exact for frontal light, where the incidence angle equals the tilt.
pub fn tilt_from_intensity(e: f64, e_max: f64) -> Result<f64, RenderError> {
    if !(e_max.is_finite() && e_max > 0.0) {
        return Err(RenderError::InvalidMax(e_max));
    }
    Ok((e / e_max).clamp(0.0, 1.0).acos())
}

/// Maximum intensity over the mask (whole image when absent); the
/// singular-point estimate of e_max for images with unknown illumination.
pub fn estimate_emax(img: &GrayImage, mask: Option<&RegionMask>) -> Result<f64, RenderError> {
    if let Some(m) = mask {
        assert_eq!(
            (m.width(), m.height()),
            (img.width(), img.height()),
            "mask dimensions"
        );
    }
    let mut max = 0.0f64;
    for i in 0..img.height() {
        for j in 0..img.width() {
            if mask.is_none_or(|m| m.contains(i as isize, j as isize)) {
                max = max.max(img.at(i, j));
            }
        }
    }
    if max > 0.0 {
        Ok(max)
    } else {
        Err(RenderError::AllDark)
    }
}
