//! Numerical geometry of the operator Poincaré disk of a finite-dimensional
//! C*-algebra.
//!
//! The library realizes the disk D = {z : ‖z‖ < 1} of a concrete C*-algebra
//! as a space of idempotent 2x2 operator matrices, builds the principal
//! fibration of its θ-unit sphere, the tautological and coefficient bundles
//! with their connections, a Kähler-type Hilbertian product with symplectic
//! imaginary part, the moment map of the isometry group action, and the
//! Möbius-equivalent half-space picture with its Liouville form. Every
//! structural identity is backed by randomized numerical checks exposed
//! through [`suites`].

pub mod algebra;
pub mod bundles;
pub mod disk;
pub mod doubled;
pub mod error;
pub mod fd;
pub mod halfspace;
pub mod kahler;
pub mod linalg;
pub mod moment;
pub mod rng;
pub mod scalar_disk;
pub mod suites;

pub use error::{Error, Result};
