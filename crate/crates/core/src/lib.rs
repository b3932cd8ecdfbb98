//! Simulation core for time-averaged ("painted") optical dipole traps.
//!
//! The crate covers the whole physics and optimisation pipeline without any
//! IO: Gaussian beam optics, synthesis of acousto-optic painting waveforms
//! and their sideband structure, characterisation of crossed painted traps
//! (minimum, trap frequencies, per-Zeeman-level depths), a truncated
//! Boltzmann evaporation model driven by piecewise-linear ramp schedules,
//! and a deterministic differential evolution optimiser.
//!
//! Everything here is `no_std` + `alloc`. File formats, spectra via FFT,
//! parallel population evaluation and the command line live in the
//! `paintrap` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constants;
pub mod evaporation;
mod math;
pub mod optics;
pub mod optimizer;
pub mod painting;
pub mod trap;

mod error;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};

/// Cartesian 3-vector in metres. `z` is vertical (up).
pub type Vec3 = nalgebra::Vector3<f64>;
