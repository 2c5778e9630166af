//! Numerical core for modelling a multi-layer PCB package for superconducting
//! multi-qubit chips: DC characterization of the stackup, microwave network
//! behavior of the control lines, resonator quality-factor extraction, transmon
//! gate dynamics, and validation of the chip lattice.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, configuration
//! and the command line live in the `qpack` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cqed;
pub mod em;
mod error;
pub mod lattice;
pub mod lm;
pub mod package;
pub mod presets;
pub mod report;
pub mod resonator;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
