use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{frequency_trajectory, DwellDensity, PaintingSpec, Waveform};
use crate::math::{exp, sin_cos};
use crate::Result;

/// Discrete line spectrum of a periodic painting waveform.
///
/// Lines sit at `f_c + mean_offset + k f_p` for `k` in
/// `first_order..first_order + power.len()`. `power[i]` is `|c_k|²`, the
/// fraction of RF power in that line; the powers sum to one up to the
/// truncation of far orders.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandComb {
    pub center_frequency: f64,
    pub mean_offset: f64,
    pub spacing: f64,
    pub first_order: i64,
    pub power: Vec<f64>,
}

impl SidebandComb {
    pub fn orders(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.power.len()).map(move |i| self.first_order + i as i64)
    }

    pub fn line_frequency(&self, order: i64) -> f64 {
        self.center_frequency + self.mean_offset + order as f64 * self.spacing
    }
}

/// Fourier-series coefficients of the baseband signal `exp(iφ)` of one
/// painting period, i.e. the sideband comb.
///
/// The linear phase drift of an asymmetric sweep is removed first so the
/// remaining signal is exactly periodic. Orders beyond the Carson bandwidth
/// plus a margin are not computed.
pub fn sideband_comb(waveform: &Waveform) -> SidebandComb {
    let n = waveform.samples_per_period();
    let f_p = waveform.painting_frequency;
    let mean_offset = waveform.mean_offset();
    let max_dev = waveform
        .frequency
        .iter()
        .map(|f| (f - waveform.center_frequency - mean_offset).abs())
        .fold(0.0, f64::max);
    let beta = max_dev / f_p;
    let reach = (beta + 10.0 + 3.0 * libm::cbrt(beta)) as i64;
    let max_order = reach.min((n as i64 - 1) / 2);

    let drift = 2.0 * PI * mean_offset / waveform.sample_rate;
    let signal: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (s, c) = sin_cos(waveform.phase[i] - drift * i as f64);
            (c, s)
        })
        .collect();
    let twiddle: Vec<(f64, f64)> = (0..n)
        .map(|m| {
            let (s, c) = sin_cos(-2.0 * PI * m as f64 / n as f64);
            (c, s)
        })
        .collect();

    let power = (-max_order..=max_order)
        .map(|k| {
            let k_mod = k.rem_euclid(n as i64) as usize;
            let (mut re, mut im) = (0.0, 0.0);
            for (i, (xr, xi)) in signal.iter().enumerate() {
                let (tr, ti) = twiddle[(k_mod * i) % n];
                re += xr * tr - xi * ti;
                im += xr * ti + xi * tr;
            }
            (re * re + im * im) / (n * n) as f64
        })
        .collect();

    SidebandComb {
        center_frequency: waveform.center_frequency,
        mean_offset,
        spacing: f_p,
        first_order: -max_order,
        power,
    }
}

/// How strongly the discrete sideband comb breaks the painted potential into
/// separate wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fragmentation {
    /// Spatial line spacing `κ f_p`.
    pub well_spacing: f64,
    /// (max - min)/max of the comb intensity over the central half of the
    /// stroke; 0 is smooth, 1 fully separated wells.
    pub corrugation: f64,
}

/// Evaluates the averaged intensity produced by the exact sideband comb:
/// each line deflects to `κ (mean_offset + k f_p)` and contributes a static
/// Gaussian weighted by its power. Lines are mutually incoherent on the
/// atoms' timescale.
pub fn comb_intensity(comb: &SidebandComb, calibration: f64, beam_waist: f64, x: f64) -> f64 {
    let reach = 6.0 * beam_waist;
    comb.orders()
        .zip(&comb.power)
        .filter_map(|(k, p)| {
            let xk = calibration * (comb.mean_offset + k as f64 * comb.spacing);
            let d = x - xk;
            (d.abs() < reach).then(|| p * exp(-2.0 * d * d / (beam_waist * beam_waist)))
        })
        .sum()
}

/// Corrugation of the comb-averaged potential for the painting `spec` with
/// the given dwell density (uniform if `None`).
pub fn sideband_fragmentation(
    spec: &PaintingSpec,
    beam_waist: f64,
    dwell: Option<&DwellDensity>,
) -> Result<Fragmentation> {
    spec.validate()?;
    let stroke = spec.stroke();
    let well_spacing = spec.well_spacing();
    if stroke == 0.0 {
        return Ok(Fragmentation {
            well_spacing,
            corrugation: 0.0,
        });
    }
    let owned;
    let dwell = match dwell {
        Some(d) => d,
        None => {
            owned = DwellDensity::uniform(stroke, 256)?;
            &owned
        }
    };
    // enough samples that the phase step per sample stays small
    let beta = spec.modulation_amplitude / spec.painting_frequency;
    let samples = (32.0 * (beta + 1.0)).max(256.0);
    let waveform = frequency_trajectory(dwell, spec, samples * spec.painting_frequency)?;
    let comb = sideband_comb(&waveform);

    let half = 0.5 * stroke;
    let step = beam_waist.min(well_spacing) / 16.0;
    let points = ((2.0 * half / step) as usize).clamp(2, 200_000);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..=points {
        let x = -half + 2.0 * half * i as f64 / points as f64;
        let v = comb_intensity(&comb, spec.calibration, beam_waist, x);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let corrugation = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
    Ok(Fragmentation {
        well_spacing,
        corrugation,
    })
}

/// Problems with a painting configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaintingWarning {
    /// `f_p` is not far enough above the trap frequencies for the atoms to
    /// see only the time average; they get dragged along and heated.
    TooSlow {
        painting_frequency: f64,
        max_trap_frequency: f64,
        margin: f64,
    },
    /// Resolved sidebands split the potential into separate wells.
    Fragmented { corrugation: f64, threshold: f64 },
}

/// Checks the painting frequency against the trap frequencies and the
/// sideband corrugation against `corrugation_threshold`.
pub fn validate_painting(
    spec: &PaintingSpec,
    trap_frequencies: [f64; 3],
    margin: f64,
    beam_waist: f64,
    corrugation_threshold: f64,
) -> Result<Vec<PaintingWarning>> {
    let mut warnings = Vec::new();
    let max_trap = trap_frequencies.iter().cloned().fold(0.0, f64::max);
    if spec.painting_frequency < margin * max_trap {
        warnings.push(PaintingWarning::TooSlow {
            painting_frequency: spec.painting_frequency,
            max_trap_frequency: max_trap,
            margin,
        });
    }
    let frag = sideband_fragmentation(spec, beam_waist, None)?;
    if frag.corrugation > corrugation_threshold {
        warnings.push(PaintingWarning::Fragmented {
            corrugation: frag.corrugation,
            threshold: corrugation_threshold,
        });
    }
    Ok(warnings)
}
