//! Galerkin boundary element capacitance extraction for axis-aligned
//! interconnect geometry.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`geometry`]: cuboid conductors, layered dielectric regions and the
//!   boundary faces they expose.
//! - [`partition`]: distance-graded splitting of faces into rectangular panels.
//! - [`kernels`]: panel-pair integrals of the single- and double-layer
//!   Laplace kernels, Romberg quadrature and a brute-force oracle.
//! - [`assembly`]: the symmetric Galerkin system for one dielectric, the block
//!   system for several dielectrics and a collocation baseline.
//! - [`solver`]: dense Cholesky and pivoted LU.
//! - [`extraction`]: per-net solves, charges and the capacitance matrix.
//!
//! All lengths are micrometres. Capacitances are reported in farads.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, timing and the
//! command line live in the companion `gbem` crate.
#![no_std]

extern crate alloc;

pub mod assembly;
pub mod error;
pub mod extraction;
pub mod geometry;
pub mod kernels;
pub mod partition;
pub mod solver;

pub use error::{Error, Result};

/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854187817e-12;
