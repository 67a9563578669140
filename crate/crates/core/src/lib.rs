//! Near-field response of extended radar targets (flat plate, sphere, cylinder) to a
//! multi-static antenna set, evaluated with the multivariate stationary phase
//! approximation and checked against brute-force physical-optics quadrature.
//!
//! Every numerical routine is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the double-precision instantiation used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod mismatch;
pub mod optimize;
pub mod oracle;
pub mod physics;
pub mod scenario;
pub mod scalar;
pub mod signal;
pub mod spa;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use vec3::{Mat3, Placement, Vec3};

pub type Vec3d = Vec3<f64>;
pub type Surface = geometry::TargetSurface<f64>;
pub type Layout = geometry::AntennaLayout<f64>;
pub type PhysicsF64 = physics::Physics<f64>;
pub type StationaryPoint = spa::StationaryPointSolution<f64>;
