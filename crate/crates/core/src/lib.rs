//! Radial spectral laboratory for the defocusing 3D quadratic nonlinear
//! Schrödinger equation `i u_t + (1/2) Δu = |u| u` and its pseudo-conformal
//! twin `i U_t + (1/2) ΔU = t^{-1/2} |U| U`.

pub mod error;
pub mod harness;
pub mod lp_decomp;
pub mod norms;
pub mod solver;
pub mod radial_spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use radial_spectral::{RadialField, RadialGrid, SpectralCoeffs};
