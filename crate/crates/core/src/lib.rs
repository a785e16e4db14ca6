//! Simulation of a two-qubit thermal machine driven by correlated
//! collisional reservoirs.
//!
//! The register layout is fixed throughout as `(S₁, S₂, A₁, A₂)`: two system
//! qubits followed by the two flying bath qubits that collide with them.

pub mod correlations;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod model;
pub mod output;
pub mod thermo;

pub use error::{Error, Result};
