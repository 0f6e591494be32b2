//! Numerical convex analysis on geometric convex functions.

pub mod directions;
pub mod error;
pub mod ext;
pub mod function;
pub mod geometry;
pub mod integration;
pub mod level_sets;
pub mod lp;
pub mod quad;
pub mod santalo;
pub mod transforms;

pub use error::{Error, Result};
pub use geometry::{ball_volume, body_volume, ConvexBody, LevelBody, NamedShape, RadialSet, VolumeConfig};
pub use integration::{EstimateMethod, IntegralEstimate};
pub use function::{Family, GeomCvxFn, IntegrabilityCertificate, RayLabel};
