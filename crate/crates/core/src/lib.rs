//! Computations with ordered *-algebras at desk scale.
//!
//! * [`poly`]: sparse polynomials in Hermitian variables, exact or floating point.
//! * [`sos`]: sum-of-squares certificates, a Gram-matrix feasibility solver and dual witnesses.
//! * [`moments`] and [`gns`]: moment functionals, their GNS representations and atomic quadrature.
//! * [`cone`] and [`riesz`]: polyhedral ordered vector spaces and the Riesz spaces `ℝ^X`.
//! * [`numeric`]: the small dense linear algebra and LP routines the rest is built on.
//!
//! The `examples/` directory has one runnable program per capability, and the
//! `star-order-lab` binary exposes the same operations on JSON files.

pub mod cli;
pub mod cone;
pub mod error;
pub mod gns;
pub mod moments;
pub mod numeric;
pub mod poly;
pub mod riesz;
pub mod sos;

pub use error::{Error, Result};
