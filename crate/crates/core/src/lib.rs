//! Simulation core for position-based quantum cryptography: dense and
//! stabilizer simulation, protocol models, entanglement attacks, spacetime
//! schedules and the numerical analyses built on them.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod attacks;
pub mod error;
pub mod matrix;
pub mod pauli;
pub mod protocols;
pub mod rng;
pub mod spacetime;
pub mod stabilizer;
pub mod state;

pub use error::{Error, Result};
