//! Curvature of metric charts and electrostatics on closed spherical spaces.
//!
//! * [`geometry`]: metric charts, Christoffel symbols, Riemann and Ricci tensors.
//! * [`geodesy`]: embeddings and radial coordinates on S² and S³.
//! * [`fields`]: flat and spherical Coulomb laws, antipodal image charges.
//! * [`gauss`]: flux quadrature over latitude circles and χ-shells.
//! * [`poisson`]: spherical-harmonic Poisson solver with the neutrality gate.

pub mod error;
pub mod fields;
pub mod gauss;
pub mod geodesy;
pub mod geometry;
pub mod poisson;
pub mod table;

pub use error::{Error, Result};
