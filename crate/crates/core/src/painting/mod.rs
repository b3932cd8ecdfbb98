//! Acousto-optic painting: dwell densities, drive waveforms, their sideband
//! combs, and the time-averaged intensity of a moving beam.
//!
//! Stroke convention: the stroke `x_s` is the movement *amplitude*. The beam
//! sweeps `[-x_s, +x_s]`, so the full painted width is `2 x_s`. The RF drive
//! sweeps `[f_c - f_s, f_c + f_s]` with `x_s = κ f_s`.

mod averaged;
mod dwell;
mod sideband;
mod waveform;

pub use averaged::{time_averaged_intensity, PaintedBeam};
pub use dwell::{dwell_density_for_profile, Deconvolution, DeconvolutionOptions, DwellDensity, DwellShape};
pub use sideband::{
    comb_intensity, sideband_comb, sideband_fragmentation, validate_painting, Fragmentation, PaintingWarning,
    SidebandComb,
};
pub use waveform::{frequency_trajectory, Waveform};

use crate::{Error, Result};

/// RF drive parameters of one acousto-optic deflector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaintingSpec {
    /// AOD centre frequency `f_c` in Hz.
    pub center_frequency: f64,
    /// Frequency-modulation amplitude `f_s` in Hz.
    pub modulation_amplitude: f64,
    /// Repetition rate of the movement `f_p` in Hz.
    pub painting_frequency: f64,
    /// Position-per-frequency calibration `κ` of the deflection optics, m/Hz.
    pub calibration: f64,
}

impl PaintingSpec {
    /// Builds a spec from a stroke amplitude, deriving `f_s = x_s / κ`.
    pub fn from_stroke(
        stroke: f64,
        center_frequency: f64,
        painting_frequency: f64,
        calibration: f64,
    ) -> Result<Self> {
        let spec = Self {
            center_frequency,
            modulation_amplitude: stroke / calibration,
            painting_frequency,
            calibration,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.painting_frequency > 0.0 && self.painting_frequency.is_finite()) {
            return Err(Error::invalid("painting_frequency", "must be > 0"));
        }
        if !(self.modulation_amplitude >= 0.0) {
            return Err(Error::invalid("modulation_amplitude", "must be >= 0"));
        }
        if !(self.calibration > 0.0) {
            return Err(Error::invalid("calibration", "must be > 0"));
        }
        if !(self.center_frequency >= self.modulation_amplitude) {
            return Err(Error::invalid(
                "center_frequency",
                "must be at least the modulation amplitude",
            ));
        }
        Ok(())
    }

    /// Movement amplitude `x_s = κ f_s` in m.
    pub fn stroke(&self) -> f64 {
        self.calibration * self.modulation_amplitude
    }

    /// Spatial spacing of the sideband comb, `κ f_p`.
    pub fn well_spacing(&self) -> f64 {
        self.calibration * self.painting_frequency
    }
}
