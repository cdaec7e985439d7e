//! Quantum-trajectory simulation of continuously monitored free-fermion chains
//! with Stark, quasi-periodic and Anderson potentials, plus the scaling
//! analysis used to locate their entanglement transitions.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod linalg;
pub mod monitor;
pub mod observables;
pub mod oracle;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
