//! Epstein zeta functions of random lattices in high dimension, the Poisson model of
//! their normalized vector lengths, and the stable laws that describe the limits.
//!
//! The special functions, lattices and enumeration are generic over [`Real`]; the
//! aliases below fix the scalar to `f64`, which is what the analysis modules use.

pub mod enumeration;
pub mod epstein;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod poisson;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod specfun;
pub mod stable;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Lattice64 = lattice::Lattice<f64>;
pub type ShortVector64 = enumeration::ShortVector<f64>;
pub type VectorLengthList64 = enumeration::VectorLengthList<f64>;
pub type LogValue64 = specfun::LogValue<f64>;
