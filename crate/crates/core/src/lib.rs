//! Sphere-plane and lens-plane electrostatics for Casimir-setup calibration.
//!
//! The crate is split in three layers:
//!
//! * [`numerics`]: compensated summation, weighted least squares, scalar
//!   minimization, the regularized incomplete gamma function and a few
//!   finite-difference helpers.
//! * [`physics`]: closed-form capacitance and force models: the exact
//!   bispherical series, the proximity-force and small-separation forms, the
//!   power expansion in `d/R`, the modified-lens geometry and the parasitic
//!   background.
//! * [`calibration`]: datasets, the piezo transform, χ² fits (linear and
//!   profiled over the piezo offset), synthetic data and fit reports.
//!
//! All quantities are SI internally. pF, µm and nm only appear at I/O
//! boundaries, through the factors in [`units`].

// `!(x > 0.0)` rejects NaN; reference values keep their full printed digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod calibration;
pub mod constants;
pub mod error;
pub mod numerics;
pub mod physics;

pub use constants::{units, EPSILON0};
pub use error::{Error, Result};
