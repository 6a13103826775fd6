//! Spectral numerics on the sphere S² and the rotation group SO(3).
//!
//! The crate is organised bottom-up:
//!
//! - [`harmonics`]: real spherical harmonics, Legendre/Gegenbauer polynomials,
//!   Wigner representation matrices, spectra and dense product quadratures.
//! - [`lattice`]: greedy ρ-separated point sets on S², SO(3) and S²×S² with a
//!   packing/covering verification report, and great-circle quadratures.
//! - [`cubature`]: positive-weight cubature rules exact on bandlimited
//!   functions, discrete Fourier coefficients and Lagrangian-spline cubature.
//! - [`splines`]: variational interpolating splines for point, great-circle
//!   and Radon functionals.
//! - [`radon_sphere`]: Funk and hemispherical transforms and their inversions.
//! - [`radon_so3`]: the Radon transform on SO(3) and its inversions.
//! - [`frames`]: bandlimited Parseval frames on S² built from a smooth
//!   Littlewood–Paley partition.
//! - [`io`]: JSON and CSV file formats shared by the command-line tool.
//!
//! Conventions: surface measure on S² (total mass 4π), arc length on great
//! circles (total 2π), Haar probability measure on SO(3).

// `!(x > 0.0)` rejects NaN on purpose; index loops follow the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cubature;
pub mod error;
pub mod frames;
pub mod harmonics;
pub mod io;
pub mod lattice;
mod par;
pub mod radon_so3;
pub mod radon_sphere;
pub mod splines;

pub use error::{Error, ErrorKind, Result};
