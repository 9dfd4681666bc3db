//! Simulation of the generalized quantum Rabi model realized with Raman
//! transitions on the 87Rb D1 line in a high-finesse cavity.
//!
//! Frequencies are ordinary frequencies in MHz throughout; generators carry
//! the factor 2π so that time is measured in μs.

pub mod atom;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod observables;
pub mod semiclassical;

pub use error::{Error, Result};
