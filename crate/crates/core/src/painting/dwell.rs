use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::math::{erf, exp, sqrt};
use crate::{Error, Result};

/// Beyond this many waists a cell's contribution to the kernel sum is
/// below e^{-72} and is skipped.
const KERNEL_REACH: f64 = 6.0;

/// Probability density of the beam position over one painting period.
///
/// The density is piecewise constant on `n` equal cells tiling
/// `[-half_width, +half_width]`; `weights[j]` is the fraction of the period
/// spent in cell `j` and the weights sum to one. A zero half-width is a point
/// mass at the origin (no painting).
#[derive(Debug, Clone, PartialEq)]
pub struct DwellDensity {
    half_width: f64,
    weights: Vec<f64>,
}

/// Parametric dwell shapes used when a schedule only specifies a stroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DwellShape {
    /// Constant speed: triangle sweep, flat-top averaged intensity.
    Uniform,
    /// Dwell ∝ 1 - (x/x_s)²: harmonic averaged potential for `x_s ≫ w`.
    #[default]
    Parabolic,
}

impl DwellShape {
    pub fn density(self, stroke: f64, cells: usize) -> Result<DwellDensity> {
        if stroke == 0.0 {
            return Ok(DwellDensity::point_mass());
        }
        match self {
            DwellShape::Uniform => DwellDensity::uniform(stroke, cells),
            DwellShape::Parabolic => DwellDensity::parabolic(stroke, cells),
        }
    }
}

impl DwellDensity {
    pub fn point_mass() -> Self {
        Self {
            half_width: 0.0,
            weights: alloc::vec![1.0],
        }
    }

    pub fn uniform(half_width: f64, cells: usize) -> Result<Self> {
        Self::from_weights(half_width, alloc::vec![1.0; cells.max(1)])
    }

    /// Cell-integrated `1 - (x/x_s)²`.
    pub fn parabolic(half_width: f64, cells: usize) -> Result<Self> {
        let n = cells.max(1);
        let antiderivative = |u: f64| u - u * u * u / 3.0;
        let weights = (0..n)
            .map(|j| {
                let a = -1.0 + 2.0 * j as f64 / n as f64;
                let b = -1.0 + 2.0 * (j + 1) as f64 / n as f64;
                antiderivative(b) - antiderivative(a)
            })
            .collect();
        Self::from_weights(half_width, weights)
    }

    /// Normalises arbitrary non-negative cell weights.
    pub fn from_weights(half_width: f64, mut weights: Vec<f64>) -> Result<Self> {
        if !(half_width >= 0.0 && half_width.is_finite()) {
            return Err(Error::invalid("dwell half_width", "must be finite and >= 0"));
        }
        if weights.is_empty() {
            return Err(Error::invalid("dwell density", "needs at least one cell"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("dwell density", "weights must be finite and >= 0"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("dwell density", "weights are all zero"));
        }
        if half_width == 0.0 {
            return Ok(Self::point_mass());
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            half_width,
            weights,
        })
    }

    /// Samples `profile` at the cell centres and normalises.
    pub fn from_fn(half_width: f64, cells: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let tmp = Self {
            half_width,
            weights: alloc::vec![0.0; cells.max(1)],
        };
        let weights = tmp.positions().map(profile).collect();
        Self::from_weights(half_width, weights)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn is_point_mass(&self) -> bool {
        self.half_width == 0.0
    }

    pub fn cells(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.weights.len() as f64
    }

    /// Left edge of cell `j` (also the right edge of cell `j-1`).
    pub fn edge(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.cell_width()
    }

    /// Cell centres.
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        let dx = self.cell_width();
        (0..self.weights.len()).map(move |j| -self.half_width + (j as f64 + 0.5) * dx)
    }

    /// Density values in 1/m at the cell centres. Empty for a point mass.
    pub fn densities(&self) -> Vec<f64> {
        if self.is_point_mass() {
            return Vec::new();
        }
        let dx = self.cell_width();
        self.weights.iter().map(|w| w / dx).collect()
    }

    /// `∫ density dx`, one up to rounding.
    pub fn integral(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean_position(&self) -> f64 {
        if self.is_point_mass() {
            return 0.0;
        }
        self.positions().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    /// Convolution of the dwell density with a 1-D Gaussian profile
    /// `exp(-2 u²/w²)`, evaluated at `u`.
    ///
    /// Each cell is integrated exactly with `erf`, so the result is the exact
    /// time average for a trajectory with constant speed inside every cell.
    pub fn smeared_gaussian(&self, u: f64, waist: f64) -> f64 {
        if self.is_point_mass() {
            return exp(-2.0 * u * u / (waist * waist));
        }
        let n = self.weights.len();
        let dx = self.cell_width();
        let reach = KERNEL_REACH * waist;
        // cells [lo, hi) overlap [u - reach, u + reach]
        let first = libm::floor((u - reach + self.half_width) / dx);
        let last = libm::ceil((u + reach + self.half_width) / dx);
        if last < 0.0 || first >= n as f64 {
            return 0.0;
        }
        let lo = first.max(0.0) as usize;
        let hi = (last as usize).min(n);
        if lo >= hi {
            return 0.0;
        }
        let scale = SQRT_2 / waist;
        let mut sum = 0.0;
        let mut left = erf(scale * (u - self.edge(lo)));
        for j in lo..hi {
            let right = erf(scale * (u - self.edge(j + 1)));
            sum += self.weights[j] * (left - right);
            left = right;
        }
        sum * waist * sqrt(PI / 8.0) / dx
    }
}

/// Settings for [`dwell_density_for_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeconvolutionOptions {
    /// Stop once the maximum residual, relative to the target peak, is below
    /// this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DeconvolutionOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_iterations: 500,
        }
    }
}

/// Outcome of [`dwell_density_for_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolution {
    /// Best iterate found.
    pub density: DwellDensity,
    /// Max |model - target| / max(target) of `density`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cells where the target asks for light but the solution was driven to
    /// zero, i.e. the exact inverse would be negative there.
    pub clipped: bool,
    /// Best residual after each iteration (index 0 is the initial guess).
    pub residual_history: Vec<f64>,
}

/// Finds the dwell density whose convolution with the static beam profile
/// reproduces `target`, sampled at the cell centres of a grid over
/// `[-half_width, half_width]`.
///
/// Starts from `d ∝ target` and applies multiplicative (Richardson-Lucy)
/// updates, which keep the density non-negative. The model is compared to
/// the target after a least-squares scale fit, since only the shape matters.
pub fn dwell_density_for_profile(
    target: &[f64],
    half_width: f64,
    beam_waist: f64,
    options: DeconvolutionOptions,
) -> Result<Deconvolution> {
    if !(half_width > 0.0) {
        return Err(Error::invalid("half_width", "must be > 0"));
    }
    if !(beam_waist > 0.0) {
        return Err(Error::invalid("beam_waist", "must be > 0"));
    }
    let n = target.len();
    let initial = DwellDensity::from_weights(half_width, target.to_vec())?;
    let peak = target.iter().cloned().fold(0.0, f64::max);

    // kernel[i * n + j]: contribution of cell j at the centre of cell i
    let centres: Vec<f64> = initial.positions().collect();
    let mut kernel = alloc::vec![0.0; n * n];
    for j in 0..n {
        let mut unit = alloc::vec![0.0; n];
        unit[j] = 1.0;
        let cell = DwellDensity {
            half_width,
            weights: unit,
        };
        for (i, &x) in centres.iter().enumerate() {
            kernel[i * n + j] = cell.smeared_gaussian(x, beam_waist);
        }
    }
    let column_sums: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| kernel[i * n + j]).sum())
        .collect();

    let forward = |w: &[f64], out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = kernel[i * n..(i + 1) * n]
                .iter()
                .zip(w)
                .map(|(k, w)| k * w)
                .sum();
        }
    };
    let residual_of = |model: &[f64]| {
        let num: f64 = model.iter().zip(target).map(|(m, t)| m * t).sum();
        let den: f64 = model.iter().map(|m| m * m).sum();
        let scale = if den > 0.0 { num / den } else { 0.0 };
        model
            .iter()
            .zip(target)
            .map(|(m, t)| (scale * m - t).abs())
            .fold(0.0, f64::max)
            / peak
    };

    let mut weights = initial.weights.clone();
    let mut model = alloc::vec![0.0; n];
    forward(&weights, &mut model);
    let mut best_weights = weights.clone();
    let mut best = residual_of(&model);
    let mut history = alloc::vec![best];
    let mut iterations = 0;
    let mut ratio = alloc::vec![0.0; n];

    while best >= options.tolerance && iterations < options.max_iterations {
        iterations += 1;
        // compare shapes: rescale the target to the model's total
        let model_total: f64 = model.iter().sum();
        let target_total: f64 = target.iter().sum();
        let s = model_total / target_total;
        for i in 0..n {
            ratio[i] = if model[i] > 0.0 {
                s * target[i] / model[i]
            } else {
                0.0
            };
        }
        for j in 0..n {
            if weights[j] == 0.0 || column_sums[j] == 0.0 {
                continue;
            }
            let back: f64 = (0..n).map(|i| kernel[i * n + j] * ratio[i]).sum();
            weights[j] *= back / column_sums[j];
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        forward(&weights, &mut model);
        let r = residual_of(&model);
        if r < best {
            best = r;
            best_weights.copy_from_slice(&weights);
        }
        history.push(best);
    }

    let max_weight = best_weights.iter().cloned().fold(0.0, f64::max);
    let clipped = best_weights
        .iter()
        .zip(target)
        .any(|(w, t)| *t > 1e-6 * peak && *w < 1e-9 * max_weight);

    Ok(Deconvolution {
        density: DwellDensity::from_weights(half_width, best_weights)?,
        residual: best,
        iterations,
        converged: best < options.tolerance,
        clipped,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force forward model: fine midpoint quadrature of
    /// ∫ exp(-2(u-s)²/w²) d(s) ds over the piecewise-constant density.
    fn forward_oracle(d: &DwellDensity, u: f64, w: f64) -> f64 {
        let dens = d.densities();
        let dx = d.cell_width();
        let sub = 400;
        let h = dx / sub as f64;
        let mut total = 0.0;
        for (j, rho) in dens.iter().enumerate() {
            for k in 0..sub {
                let s = d.edge(j) + (k as f64 + 0.5) * h;
                total += rho * libm::exp(-2.0 * (u - s) * (u - s) / (w * w)) * h;
            }
        }
        total
    }

    #[test]
    fn shapes_have_unit_integral() {
        for d in [
            DwellDensity::uniform(1e-4, 37).unwrap(),
            DwellDensity::parabolic(3e-4, 64).unwrap(),
            DwellDensity::from_fn(2e-5, 11, |x| 1.0 + x * 1e4).unwrap(),
        ] {
            assert!((d.integral() - 1.0).abs() < 1e-12);
            let by_density: f64 = d.densities().iter().map(|r| r * d.cell_width()).sum();
            assert!((by_density - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_empty_and_negative() {
        assert!(DwellDensity::from_weights(1e-4, alloc::vec![0.0; 5]).is_err());
        assert!(DwellDensity::from_weights(1e-4, alloc::vec![]).is_err());
        assert!(DwellDensity::from_weights(1e-4, alloc::vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn smeared_gaussian_matches_quadrature() {
        let d = DwellDensity::from_fn(60e-6, 24, |x| 2.0 + (x * 1e5).sin()).unwrap();
        for &u in &[-80e-6, -30e-6, 0.0, 12e-6, 59e-6, 75e-6] {
            let a = d.smeared_gaussian(u, 5e-6);
            let b = forward_oracle(&d, u, 5e-6);
            assert!((a - b).abs() < 1e-6 * b.max(1e-3), "u={u} {a} {b}");
        }
    }

    #[test]
    fn narrow_target_concentrates_in_one_cell() {
        let mut target = alloc::vec![0.0; 41];
        target[20] = 1.0;
        let out =
            dwell_density_for_profile(&target, 50e-6, 5e-6, DeconvolutionOptions::default()).unwrap();
        let w = out.density.weights();
        assert!((w[20] - 1.0).abs() < 1e-12);
        assert_eq!(w.iter().filter(|x| **x > 0.0).count(), 1);
    }

    #[test]
    fn beam_profile_target_with_tiny_stroke_is_point_like() {
        let waist = 5e-6;
        let half = waist / 100.0;
        let target: Vec<f64> = (0..21)
            .map(|j| {
                let x = -half + (j as f64 + 0.5) * 2.0 * half / 21.0;
                libm::exp(-2.0 * x * x / (waist * waist))
            })
            .collect();
        let out =
            dwell_density_for_profile(&target, half, waist, DeconvolutionOptions::default()).unwrap();
        // all mass within ±x_s = w/100: smeared profile equals the static one
        for &u in &[0.0, 2e-6, 5e-6] {
            let smeared = out.density.smeared_gaussian(u, waist);
            let static_profile = libm::exp(-2.0 * u * u / (waist * waist));
            assert!((smeared - static_profile).abs() < 1e-3, "{smeared} {static_profile}");
        }
    }

    #[test]
    fn harmonic_target_is_reproduced_away_from_edges() {
        let waist = 35e-6;
        let half = 10.0 * waist;
        let n = 80;
        let positions: Vec<f64> = (0..n)
            .map(|j| -half + (j as f64 + 0.5) * 2.0 * half / n as f64)
            .collect();
        let target: Vec<f64> = positions.iter().map(|x| 1.0 - (x / half) * (x / half)).collect();
        let out =
            dwell_density_for_profile(&target, half, waist, DeconvolutionOptions::default()).unwrap();

        // brute-force forward convolution of the returned density
        let model: Vec<f64> = positions
            .iter()
            .map(|&x| forward_oracle(&out.density, x, waist))
            .collect();
        let num: f64 = model.iter().zip(&target).map(|(m, t)| m * t).sum();
        let den: f64 = model.iter().map(|m| m * m).sum();
        let scale = num / den;
        for ((x, m), t) in positions.iter().zip(&model).zip(&target) {
            if x.abs() < half - waist {
                assert!((scale * m - t).abs() < 0.01, "x={x} model={} target={t}", scale * m);
            }
        }
        // reported residual history never increases
        for pair in out.residual_history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    proptest! {
        #[test]
        fn smeared_gaussian_conserves_area(
            weights in proptest::collection::vec(0.01f64..1.0, 4..30),
            half in 1e-6f64..2e-4,
        ) {
            // ∫ (d * g)(u) du = ∫ g = w √(π/2)
            let d = DwellDensity::from_weights(half, weights).unwrap();
            let w = 7e-6;
            let span = half + 8.0 * w;
            let n = 4000;
            let h = 2.0 * span / n as f64;
            let area: f64 = (0..n)
                .map(|i| d.smeared_gaussian(-span + (i as f64 + 0.5) * h, w) * h)
                .sum();
            let expected = w * (PI / 2.0).sqrt();
            prop_assert!((area - expected).abs() / expected < 1e-3);
        }
    }
}
