//! Muckenhoupt `A_p` analysis of polynomial symbols, small-divisor-free
//! shifts on the integer lattice, and the periodic multiplier solve they
//! enable.
//!
//! The crate has four parts:
//!
//! * [`weights`]: `A_p`, `A_1`, doubling and reverse Hölder quotients of
//!   weights over cubes, sampled suprema and the critical exponent search.
//! * [`poly`]: multivariate polynomials with complex coefficients and the
//!   reverse Hölder constant of their moduli.
//! * [`shift`]: shifts `ξ₀` certified against small divisors `P(ξ₀+m)`.
//! * [`torus`]: grid functions on `[0, 2π)^n`, Sobolev norms, and the
//!   conjugated solve `û(m) = f̂(m)/P(ξ₀+m)` with its a priori estimate.

pub mod error;
pub mod flag;
pub mod poly;
pub mod quadrature;
pub mod shift;
pub mod torus;
pub mod weights;

pub use error::{Error, Result};
pub use poly::{MultiIndex, Polynomial, RhConstantEstimate};
pub use quadrature::{Cube, QuadratureRule, QuadratureSpec};
pub use shift::{LatticeWindow, Recheck, ShiftCertificate};
pub use torus::{Domain, GridFunction, SobolevIndex, SolveReport};
pub use weights::{ApReport, CriticalExponent, CubeFamily, Weight, WeightFamily};

pub use num_complex::Complex64;

/// Version of this crate, recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
