//! Bicolor loop models on square and honeycomb tori.
//!
//! The crate enumerates closed bicolor loop configurations, assembles the
//! vertex, plaquette and double-plaquette Hamiltonians as exact integer
//! sparse operators, maps out Krylov sectors of the kinetic moves, computes
//! exact Schmidt spectra of uniform sector states and evaluates the boundary
//! counting formulas behind the entanglement bounds.

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod dynamics;
pub mod spectra;
pub mod entanglement;
pub mod counting;
pub mod verify;

pub use error::{LoopError, Result};
