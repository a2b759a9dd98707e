//! Computational geometry of the complex hyperbolic plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`hermitian`]: the signature-(2,1) form on C³, point classes, horospherical
//!   coordinates and the Bergman distance.
//! - [`isometry`]: holomorphic and antiholomorphic isometries as 3×3 matrices,
//!   their classification, fixed points and normal forms.
//! - [`boundary`]: the Heisenberg group at infinity with the Cygan metric,
//!   R-circles, chains, Heisenberg spheres, real involutions and the Cartan
//!   angular invariant.
//! - [`groups`]: finitely generated groups, word balls, limit-set samples and
//!   finite-radius certificates (Dirichlet, cusp, thin part, collar).
//! - [`deformations`]: bending deformations of Fuchsian groups and the
//!   quasi-Fuchsian curve of reflection groups, with non-triviality certificates.
//! - [`io`]: text and binary file formats (group files, point clouds, PPM
//!   renders, key/value reports).

pub mod boundary;
pub mod deformations;
pub mod error;
pub mod groups;
pub mod hermitian;
pub mod io;
pub mod isometry;

pub use error::{Error, Result};
pub use hermitian::{HoroPoint, PointClass, ProjectiveVector};
pub use isometry::{Isometry, IsometryKind};

pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
