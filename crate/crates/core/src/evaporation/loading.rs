use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CloudState;
use crate::math::{exp, ln, sin_cos, sqrt};
use crate::trap::TrapConfig;
use crate::{Error, Result, Vec3};

/// Laser-cooled cloud before transfer: Gaussian of 1/e radius `radius`
/// centred on the beam crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Molasses {
    pub atoms: f64,
    /// Temperature in K.
    pub temperature: f64,
    /// 1/e radius in m.
    pub radius: f64,
}

impl Molasses {
    pub fn validate(&self) -> Result<()> {
        if !(self.atoms > 0.0 && self.temperature > 0.0 && self.radius > 0.0) {
            return Err(Error::invalid("molasses", "atoms, temperature and radius must be > 0"));
        }
        Ok(())
    }
}

/// Monte Carlo settings for the capture overlap integral and the transfer
/// calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadingOptions {
    pub samples: usize,
    pub seed: u64,
    /// Fraction of the geometrically captured atoms that survive the
    /// transfer, a fit parameter of the loading model. 1 is pure geometry.
    pub transfer_efficiency: f64,
}

impl Default for LoadingOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0x5eed,
            transfer_efficiency: 1.0,
        }
    }
}

/// Vertical extent around the beams worth sampling: three local radii at the
/// cloud edge, or everything when a beam is tilted out of the horizontal.
fn vertical_band(cfg: &TrapConfig, edge: f64) -> Option<(f64, f64)> {
    let mut band: Option<(f64, f64)> = None;
    for pb in cfg.beams.iter().filter(|b| b.beam.power > 0.0) {
        let b = &pb.beam;
        if b.axis.z.abs() > 1e-9 {
            return None;
        }
        let (wx, wy) = b.radii_at(edge);
        let half = 3.0 * (b.paint_axis.z.abs() * (pb.dwell.half_width() + wx) + b.transverse_axis().z.abs() * wy);
        let (lo, hi) = (b.focus.z - half, b.focus.z + half);
        band = Some(band.map_or((lo, hi), |(a, c)| (a.min(lo), c.max(hi))));
    }
    band
}

/// Atoms captured from `molasses`: the fraction of the cloud where the
/// optical potential is deeper than `k_B T_mol`, split equally over the
/// three Zeeman levels, at the molasses temperature, and scaled by the
/// transfer efficiency.
///
/// The overlap integral is sampled with the horizontal coordinates drawn
/// from the cloud and the vertical one uniformly over the band the beams
/// occupy, which keeps the estimator useful for thin beams.
pub fn load_from_molasses(cfg: &TrapConfig, molasses: &Molasses, options: &LoadingOptions) -> Result<CloudState> {
    molasses.validate()?;
    cfg.validate()?;
    if options.samples == 0 {
        return Err(Error::invalid("samples", "must be >= 1"));
    }
    if !(options.transfer_efficiency > 0.0 && options.transfer_efficiency <= 1.0) {
        return Err(Error::invalid("transfer_efficiency", "must be in (0, 1]"));
    }
    let c = &cfg.constants;
    let threshold = c.boltzmann * molasses.temperature;
    let sigma = molasses.radius / core::f64::consts::SQRT_2;
    let center = cfg.crossing_point();
    let cloud = (center.z - 6.0 * sigma, center.z + 6.0 * sigma);
    let Some(band) = vertical_band(cfg, 3.0 * molasses.radius) else {
        if cfg.beams.iter().all(|b| b.beam.power == 0.0) {
            return Ok(CloudState::unpolarized(0.0, molasses.temperature));
        }
        return sample(cfg, molasses, options, center, sigma, cloud, threshold);
    };
    let lo = band.0.max(cloud.0);
    let hi = band.1.min(cloud.1);
    if lo >= hi {
        return Ok(CloudState::unpolarized(0.0, molasses.temperature));
    }
    sample(cfg, molasses, options, center, sigma, (lo, hi), threshold)
}

fn sample(
    cfg: &TrapConfig,
    molasses: &Molasses,
    options: &LoadingOptions,
    center: Vec3,
    sigma: f64,
    (lo, hi): (f64, f64),
    threshold: f64,
) -> Result<CloudState> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let length = hi - lo;
    let norm = 1.0 / (sqrt(2.0 * core::f64::consts::PI) * sigma);
    let mut sum = 0.0;
    for _ in 0..options.samples {
        // Box-Muller pair for the horizontal plane
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = sigma * sqrt(-2.0 * ln(u1));
        let (s, co) = sin_cos(2.0 * core::f64::consts::PI * u2);
        let z = lo + length * rng.gen::<f64>();
        let dz = z - center.z;
        let point = Vec3::new(center.x + r * co, center.y + r * s, z);
        if cfg.optical_potential(&point).abs() > threshold {
            sum += length * norm * exp(-0.5 * dz * dz / (sigma * sigma));
        }
    }
    let fraction = (sum / options.samples as f64).min(1.0) * options.transfer_efficiency;
    Ok(CloudState::unpolarized(molasses.atoms * fraction, molasses.temperature))
}
