use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{DwellDensity, PaintingSpec};
use crate::math::sin_cos;
use crate::{Error, Result};

/// One painting period of an AOD drive signal.
///
/// `frequency` holds the absolute instantaneous RF frequency. `phase` is the
/// phase of the complex baseband signal relative to the carrier `f_c`, i.e.
/// the trapezoidal integral of `2π (f - f_c)` starting from zero. That is
/// the quantity an IQ-modulated SDR streams with its LO tuned to `f_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    /// Samples per second; always an integer multiple of `painting_frequency`.
    pub sample_rate: f64,
    pub painting_frequency: f64,
    pub center_frequency: f64,
    pub frequency: Vec<f64>,
    pub phase: Vec<f64>,
    /// Baseband phase gained over one full period, including the step that
    /// wraps from the last sample back to the first.
    pub period_phase_advance: f64,
    /// Empty dwell cells that were crossed in a single sample.
    pub zero_dwell_cells: usize,
}

impl Waveform {
    pub fn samples_per_period(&self) -> usize {
        self.frequency.len()
    }

    pub fn period(&self) -> f64 {
        1.0 / self.painting_frequency
    }

    /// Baseband phase at absolute sample index `k`, continuing across
    /// periods.
    pub fn phase_at(&self, k: usize) -> f64 {
        let n = self.samples_per_period();
        self.phase[k % n] + (k / n) as f64 * self.period_phase_advance
    }

    pub fn frequency_at(&self, k: usize) -> f64 {
        self.frequency[k % self.samples_per_period()]
    }

    /// Unit-amplitude IQ samples `(cos φ, sin φ)` for `n_periods` periods.
    pub fn iq(&self, n_periods: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..n_periods * self.samples_per_period()).map(move |k| {
            let (s, c) = sin_cos(self.phase_at(k));
            (c, s)
        })
    }

    /// Mean frequency offset from `f_c`; zero for a symmetric dwell density.
    pub fn mean_offset(&self) -> f64 {
        self.period_phase_advance / (2.0 * PI) * self.painting_frequency
    }
}

/// Builds the drive waveform that makes the beam spend, per period, a fraction
/// `weights[j]` of its time in dwell cell `j`.
///
/// The beam moves from `-x_s` to `+x_s` during the first half period and
/// back during the second (triangle sweep, no flyback), at constant speed
/// within each cell. Empty cells are crossed in one sample period and counted
/// in [`Waveform::zero_dwell_cells`].
pub fn frequency_trajectory(
    dwell: &DwellDensity,
    spec: &PaintingSpec,
    sample_rate: f64,
) -> Result<Waveform> {
    spec.validate()?;
    let f_p = spec.painting_frequency;
    if !(sample_rate >= 100.0 * f_p) {
        return Err(Error::invalid(
            "sample_rate",
            "must be at least 100 times the painting frequency",
        ));
    }
    if dwell.half_width() > spec.stroke() * (1.0 + 1e-9) {
        return Err(Error::invalid(
            "dwell density",
            "extends beyond the stroke allowed by the modulation amplitude",
        ));
    }
    let n = libm::round(sample_rate / f_p) as usize;
    let sample_rate = n as f64 * f_p;
    let dt = 1.0 / sample_rate;
    let half_period = 0.5 / f_p;

    let weights = dwell.weights();
    let zero_cells = if dwell.is_point_mass() {
        0
    } else {
        weights.iter().filter(|w| **w == 0.0).count()
    };
    let available = half_period - zero_cells as f64 * dt;
    if available <= 0.0 {
        return Err(Error::invalid(
            "dwell density",
            "too many empty cells for the sample rate",
        ));
    }
    // cumulative time at each cell edge during the forward sweep
    let mut edges_t = Vec::with_capacity(weights.len() + 1);
    edges_t.push(0.0);
    let mut acc = 0.0;
    for w in weights {
        acc += if *w == 0.0 { dt } else { w * available };
        edges_t.push(acc);
    }

    let forward_position = |s: f64| -> f64 {
        if dwell.is_point_mass() {
            return 0.0;
        }
        let j = match edges_t.binary_search_by(|e| e.partial_cmp(&s).unwrap()) {
            Ok(j) => j.min(weights.len() - 1),
            Err(j) => j.saturating_sub(1).min(weights.len() - 1),
        };
        let span = edges_t[j + 1] - edges_t[j];
        let frac = ((s - edges_t[j]) / span).clamp(0.0, 1.0);
        dwell.edge(j) + frac * dwell.cell_width()
    };

    let frequency: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let s = if t <= half_period { t } else { 2.0 * half_period - t };
            spec.center_frequency + forward_position(s) / spec.calibration
        })
        .collect();

    let offset = |f: f64| f - spec.center_frequency;
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    phase.push(0.0);
    for pair in frequency.windows(2) {
        acc += PI * (offset(pair[0]) + offset(pair[1])) * dt;
        phase.push(acc);
    }
    let advance = acc + PI * (offset(frequency[n - 1]) + offset(frequency[0])) * dt;

    Ok(Waveform {
        sample_rate,
        painting_frequency: f_p,
        center_frequency: spec.center_frequency,
        frequency,
        phase,
        period_phase_advance: advance,
        zero_dwell_cells: zero_cells,
    })
}
