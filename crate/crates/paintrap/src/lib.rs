//! File formats, spectra, parallel evaluation and the command line for the
//! painted-trap simulator in `paintrap-core`.

pub mod commands;
pub mod config;
mod error;
pub mod formats;
pub mod parallel;
pub mod spectrum;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use paintrap_core as core;
