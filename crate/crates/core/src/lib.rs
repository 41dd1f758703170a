//! Exemplar-based shape from shading.
//!
//! The pipeline recovers a depth map from a single gray-level image in two
//! stages: a needle map (per-pixel surface orientation) is propagated from
//! boundary conditions using nearest-neighbor lookups against a database of
//! training exemplars, then integrated into depth with an iterative
//! relaxation scheme.
//!
//! Modules follow the pipeline order:
//!
//! * [`angles`]: slant/tilt orientations, normals, angle wrapping
//! * [`grid`]: raster containers (images, depth maps, needle maps, masks)
//! * [`surface`]: analytic training surfaces and depth-to-orientation
//! * [`gallery`]: bundled deterministic demo surfaces
//! * [`render`]: Lambertian shading and tilt recovery from intensity
//! * [`exemplar`]: the example database and its normalized distance
//! * [`solver`]: boundary conditions and needle-map propagation
//! * [`integrate`]: depth reconstruction from the needle map
//! * [`metrics`]: match-distance, slant-error, and depth-error reports
//! * [`io`]: text file formats for every artifact

pub mod angles;
pub mod exemplar;
pub mod gallery;
pub mod grid;
pub mod integrate;
pub mod io;
pub mod metrics;
pub mod render;
pub mod solver;
pub mod surface;

pub use angles::{wrap_angle, wrap_angle_diff, AngleError, Normal, Orientation, TILT_MAX};
pub use exemplar::{DistanceConfig, Exemplar, ExemplarDb, Neighbor, Probe, SamplingMode};
pub use grid::{DepthMap, GrayImage, NeedleMap, OrientationField, RegionMask};
pub use integrate::{IntegrationResult, IntegratorConfig};
pub use metrics::EvalReport;
pub use render::{LightSource, RenderConfig};
pub use solver::{BoundaryCondition, PropagateConfig};
pub use surface::{AnalyticSurface, SurfaceId};
