//! Simulation toolkit for noisy quantum annealing with dynamical decoupling
//! on trapped-ion style Ising hardware.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod ising;
pub mod magic;
pub mod noise;
pub mod problems;

pub use error::{Error, Result};
