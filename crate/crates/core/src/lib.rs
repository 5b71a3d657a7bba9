//! Volumes and centroids of solids sliced perpendicular to a curved path.
//!
//! The crate is organized around a generalized Pappus-Guldin volume formula:
//! slice a solid by planes perpendicular to a framed curve, integrate the
//! cross-section areas with a Jacobian correction, and the volume drops out.
//! When the curve passes through the centroids of its own perpendicular
//! cross-sections (a *centroid curve*), the correction vanishes and the
//! volume is simply the integral of the section areas.
//!
//! Modules:
//!
//! * [`frames`] — arc-length curves, ribbons and their moving frames.
//! * [`body`] — smooth implicit convex bodies, ray casting, plane sections,
//!   half-space segment volumes and a Monte-Carlo oracle.
//! * [`volume`] — the slice-series volume and centroid formulas.
//! * [`curve`] — volume distance, barycentric cuts and centroid-curve tracing.
//! * [`rod`] — planar profiles and the bent-rod centroid formula.
//! * [`surface`] — the lateral-surface-area lower bound from boundary traces.
//! * [`spec`] — JSON input formats shared with the command line tool.

pub mod body;
pub mod curve;
pub mod error;
pub mod frames;
pub mod quad;
pub mod rod;
pub mod spec;
pub mod spectral;
pub mod surface;
pub mod volume;

pub use error::{Error, ErrorClass, Result};
