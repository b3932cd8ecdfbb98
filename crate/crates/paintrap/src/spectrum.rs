//! RF spectrum of a painting waveform.

use paintrap_core::painting::Waveform;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Magnitude spectrum on an ascending frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Absolute RF frequency of each bin in Hz.
    pub frequency: Vec<f64>,
    /// `|X_k| / N`, so that the squared amplitudes sum to the mean signal
    /// power (one for a unit-amplitude drive).
    pub amplitude: Vec<f64>,
    /// Bin width, `f_p / n_periods`.
    pub resolution: f64,
}

impl Spectrum {
    pub fn total_power(&self) -> f64 {
        self.amplitude.iter().map(|a| a * a).sum()
    }

    /// Index of the bin nearest to `f`.
    pub fn bin_of(&self, f: f64) -> usize {
        let i = ((f - self.frequency[0]) / self.resolution).round();
        i.clamp(0.0, (self.frequency.len() - 1) as f64) as usize
    }

    /// Bins that are local maxima above `floor` times the largest amplitude.
    pub fn peaks(&self, floor: f64) -> Vec<usize> {
        let max = self.amplitude.iter().cloned().fold(0.0, f64::max);
        let a = &self.amplitude;
        (0..a.len())
            .filter(|&i| {
                a[i] > floor * max
                    && (i == 0 || a[i] >= a[i - 1])
                    && (i + 1 == a.len() || a[i] >= a[i + 1])
            })
            .collect()
    }
}

/// DFT of the unit-amplitude signal `exp(iφ)` repeated over `n_periods`,
/// with the zero-offset bin at the centre frequency.
pub fn rf_spectrum(w: &Waveform, n_periods: usize) -> Result<Spectrum> {
    if n_periods == 0 {
        return Err(Error::config("n_periods must be >= 1"));
    }
    let n = n_periods * w.samples_per_period();
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(1.0, w.phase_at(k)))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let resolution = w.sample_rate / n as f64;
    // ascending order: negative offsets first
    let half = n / 2;
    let (frequency, amplitude) = (0..n)
        .map(|j| {
            let k = (j + n - half) % n;
            let offset = k as i64 - if k >= n - half { n as i64 } else { 0 };
            (
                w.center_frequency + offset as f64 * resolution,
                buf[k].norm() / n as f64,
            )
        })
        .unzip();
    Ok(Spectrum {
        frequency,
        amplitude,
        resolution,
    })
}
