//! Quasi-periodic electromagnetic scattering by a bi-periodic inhomogeneous
//! layer sitting on a perfectly conducting plate.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: Floquet mode bookkeeping (`α_n`, `β_n`) and Fourier
//!   analysis/synthesis on the `2π × 2π` cell.
//! * [`greens`]: the α-quasi-periodic free-space Green's function and the
//!   dipole-density incident fields built from it.
//! * [`rayleigh`]: Rayleigh sequences, tangential traces and the transparent
//!   boundary operator `R`.
//! * [`forward`]: medium profiles, the Fourier-modal layer solver, the
//!   Dirichlet-to-Neumann map `T` and the full scattering solve.
//! * [`sturm`], [`separable`], [`inverse`]: quasi-periodic Sturm-Liouville
//!   spectra, separable Maxwell solutions and moment-based recovery of
//!   `q₁ − q₂`.
//! * [`cli`]: scenario files and the `gratescat` batch front-end.

pub mod cli;
pub mod error;
pub mod forward;
pub mod greens;
pub mod inverse;
pub mod lattice;
pub mod linalg;
pub mod quadrature;
pub mod rayleigh;
pub mod separable;
pub mod sturm;
pub mod trig;
pub mod vec3;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Cell area of the `2π × 2π` period.
pub const CELL_AREA: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
