//! Magnetostatic model of a planar nanomagnetic resonance lens.
//!
//! A thin disk magnetized along +z with two diagonally opposed quarter-disk
//! cuts, placed in a uniform bias field antiparallel to its magnetization,
//! produces an isolated non-zero minimum of |B| above its top face. This crate
//! computes that field from the pseudo-surface-charge model, cross-checks it
//! against the equivalent Amperian surface currents, locates and classifies the
//! |B| minimum, and turns the local field structure into resonance observables.
//!
//! Lengths are meters and fields are Tesla throughout the library; nanometers,
//! Gauss and G/Å only appear in [`io`] and the CLI.

pub mod amperian;
pub mod analysis;
pub mod error;
pub mod fieldsolver;
pub mod geometry;
pub mod io;
pub mod quadrature;
pub mod resonance;
pub mod tensor;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
pub use fieldsolver::{field_at, jacobian_at, BiasField, FieldSample};
pub use geometry::LensGeometry;
pub use quadrature::QuadratureSpec;
pub use tensor::GradientTensor;

pub use nalgebra::{Matrix3, Vector3};

/// Permeability of free space, T·m/A.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
