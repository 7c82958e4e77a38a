//! Explicit quantities of the Hardy–Littlewood circle method for systems of
//! integer polynomials: complete exponential sums, major arcs, local
//! densities, singular series and integral, exact zero counts, and
//! Nullstellensatz certificates.

pub mod arith;
pub mod bounds;
pub mod counting;
mod error;
pub mod expsums;
pub mod integral;
pub mod linalg;
pub mod localdensities;
pub mod nullstellensatz;
pub mod polycore;
pub mod series;
mod ser;

pub use error::{Error, Result};
