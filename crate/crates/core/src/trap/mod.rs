//! Crossed painted-beam trap: total potential including gravity and the
//! spin-distillation gradient, minimum search, trap frequencies and per-spin
//! trap depths.

mod hessian;
mod simplex;

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::math::{exp, ln, sqrt};
use crate::painting::PaintedBeam;
use crate::{Error, PhysicalConstants, Result, Vec3};
use simplex::{SimplexOptions, SimplexOutcome};

/// Zeeman sub-level of the F=1 manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinState {
    Minus,
    Zero,
    Plus,
}

impl SpinState {
    pub const ALL: [SpinState; 3] = [SpinState::Minus, SpinState::Zero, SpinState::Plus];

    pub fn m_f(self) -> i8 {
        match self {
            SpinState::Minus => -1,
            SpinState::Zero => 0,
            SpinState::Plus => 1,
        }
    }

    /// Position in `[m_F=-1, 0, +1]` arrays.
    pub fn index(self) -> usize {
        (self.m_f() + 1) as usize
    }
}

/// Two painted beams, gravity and a vertical magnetic gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    pub beams: [PaintedBeam; 2],
    /// Magnitude of the vertical field gradient in T/m.
    pub gradient: f64,
    pub gravity: bool,
    pub constants: PhysicalConstants,
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        for b in &self.beams {
            b.beam.validate()?;
        }
        if !(self.gradient >= 0.0 && self.gradient.is_finite()) {
            return Err(Error::invalid("gradient", "must be finite and >= 0"));
        }
        self.constants.validate()
    }

    /// Optical part of the potential, `Σ c_dip Ī_b(r)`.
    pub fn optical_potential(&self, point: &Vec3) -> f64 {
        let intensity: f64 = self.beams.iter().map(|b| b.intensity(point)).sum();
        self.constants.dipole_coefficient * intensity
    }

    /// Vertical force magnitude per mass exerted by the gradient on `spin`,
    /// `|m_F g_F| µ_B B' / m`, pointing down.
    pub fn magnetic_acceleration(&self, spin: SpinState) -> f64 {
        let c = &self.constants;
        spin.m_f().unsigned_abs() as f64 * c.lande_g_f * c.bohr_magneton * self.gradient / c.mass
    }

    /// Total potential energy in J. The magnetic term is a linear-gradient
    /// magnitude model that pulls `m_F = ±1` downwards.
    pub fn potential(&self, point: &Vec3, spin: SpinState) -> f64 {
        let c = &self.constants;
        let gravity = if self.gravity { c.gravity } else { 0.0 };
        self.optical_potential(point) + c.mass * (gravity + self.magnetic_acceleration(spin)) * point.z
    }

    /// Midpoint of closest approach between the two beam axes.
    pub fn crossing_point(&self) -> Vec3 {
        let (a, b) = (&self.beams[0].beam, &self.beams[1].beam);
        let w = a.focus - b.focus;
        let d = a.axis.dot(&b.axis);
        let denom = 1.0 - d * d;
        if denom < 1e-12 {
            return 0.5 * (a.focus + b.focus);
        }
        let (p, q) = (a.axis.dot(&w), b.axis.dot(&w));
        let s = (d * q - p) / denom;
        let t = (q - d * p) / denom;
        0.5 * ((a.focus + s * a.axis) + (b.focus + t * b.axis))
    }

    /// Smallest transverse waist of either beam.
    pub fn smallest_waist(&self) -> f64 {
        self.beams
            .iter()
            .map(|b| b.beam.waist_x.min(b.beam.waist_y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Finite-difference step for the Hessian, `max(50 nm, w_min / 200)`.
    pub fn hessian_step(&self) -> f64 {
        (self.smallest_waist() / 200.0).max(50e-9)
    }

    /// Length of the escape rays: 20 times the largest extent of any beam,
    /// counting painted half-widths and Rayleigh lengths.
    pub fn escape_length(&self) -> f64 {
        20.0 * self
            .beams
            .iter()
            .map(|b| {
                b.painted_half_width()
                    .max(b.beam.waist_y)
                    .max(b.beam.rayleigh_length_x())
                    .max(b.beam.rayleigh_length_y())
            })
            .fold(0.0, f64::max)
    }
}

/// Total potential of `cfg` at `point` for `spin`.
pub fn total_potential(cfg: &TrapConfig, point: &Vec3, spin: SpinState) -> f64 {
    cfg.potential(point, spin)
}

/// Tuning of the minimum search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumSearch {
    /// Initial simplex edge; `None` uses half the smallest waist.
    pub initial_step: Option<f64>,
    pub diameter_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for MinimumSearch {
    fn default() -> Self {
        Self {
            initial_step: None,
            diameter_tolerance: 10e-9,
            max_iterations: 4000,
        }
    }
}

/// Local minimum of the total potential near `seed`.
pub fn find_minimum(cfg: &TrapConfig, spin: SpinState, seed: Vec3) -> Result<Vec3> {
    find_minimum_with(cfg, spin, seed, MinimumSearch::default())
}

pub fn find_minimum_with(
    cfg: &TrapConfig,
    spin: SpinState,
    seed: Vec3,
    search: MinimumSearch,
) -> Result<Vec3> {
    let w_min = cfg.smallest_waist();
    let opts = SimplexOptions {
        initial_step: search.initial_step.unwrap_or(0.5 * w_min),
        diameter_tolerance: search.diameter_tolerance,
        max_iterations: search.max_iterations,
        escape_radius: cfg.escape_length(),
    };
    let untrapped = |p: Vec3| Error::Untrapped {
        x: p.x,
        y: p.y,
        z: p.z,
    };
    let point = match simplex::minimize(|p| cfg.potential(p, spin), seed, opts) {
        SimplexOutcome::Converged { point } => point,
        SimplexOutcome::Escaped { point } => return Err(untrapped(point)),
        SimplexOutcome::Exhausted {
            point,
            diameter,
            iterations,
        } => {
            if cfg.optical_potential(&point) == 0.0 {
                return Err(untrapped(point));
            }
            return Err(Error::NotConverged {
                iterations,
                diameter,
            });
        }
    };
    // a "minimum" with no light around it is a numerical plateau
    let optical = cfg.optical_potential(&point);
    if optical == 0.0 {
        return Err(untrapped(point));
    }
    // reject convergence onto a slope
    let h = cfg.hessian_step();
    let gradient = Vec3::new(
        cfg.potential(&(point + Vec3::x() * h), spin) - cfg.potential(&(point - Vec3::x() * h), spin),
        cfg.potential(&(point + Vec3::y() * h), spin) - cfg.potential(&(point - Vec3::y() * h), spin),
        cfg.potential(&(point + Vec3::z() * h), spin) - cfg.potential(&(point - Vec3::z() * h), spin),
    ) / (2.0 * h);
    let c = &cfg.constants;
    let force_scale = optical.abs() / w_min + c.mass * c.gravity;
    if gradient.norm() > 0.05 * force_scale {
        return Err(Error::NotConverged {
            iterations: search.max_iterations,
            diameter: search.diameter_tolerance,
        });
    }
    Ok(point)
}

/// Harmonic trap frequencies at a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapFrequencies {
    /// Frequencies in Hz of the principal axes closest to x, y and z.
    pub frequencies: [f64; 3],
    /// Unit principal axes matching `frequencies`.
    pub axes: [Vec3; 3],
    pub hessian: Matrix3<f64>,
}

impl TrapFrequencies {
    /// Geometric mean angular frequency `2π (f_x f_y f_z)^{1/3}`.
    pub fn mean_angular_frequency(&self) -> f64 {
        let [fx, fy, fz] = self.frequencies;
        2.0 * PI * libm::cbrt(fx * fy * fz)
    }
}

/// Diagonalises the Richardson-extrapolated Hessian of the potential at
/// `minimum`. A negative curvature is a saddle and an error.
pub fn trap_frequencies(cfg: &TrapConfig, spin: SpinState, minimum: &Vec3) -> Result<TrapFrequencies> {
    let hess = hessian::hessian(|p| cfg.potential(p, spin), minimum, cfg.hessian_step());
    let eigen = SymmetricEigen::new(hess);
    let mass = cfg.constants.mass;

    // assign eigenpairs to x, y, z greedily by largest vector component
    let mut slot_of = [usize::MAX; 3];
    let mut taken = [false; 3];
    for _ in 0..3 {
        let mut best = (0, 0, -1.0);
        for e in 0..3 {
            if slot_of[e] != usize::MAX {
                continue;
            }
            for (axis, used) in taken.iter().enumerate() {
                let c = eigen.eigenvectors[(axis, e)].abs();
                if !used && c > best.2 {
                    best = (e, axis, c);
                }
            }
        }
        slot_of[best.0] = best.1;
        taken[best.1] = true;
    }

    let mut frequencies = [0.0; 3];
    let mut axes = [Vec3::zeros(); 3];
    for e in 0..3 {
        let curvature = eigen.eigenvalues[e];
        if curvature < 0.0 {
            return Err(Error::SaddlePoint { curvature });
        }
        let slot = slot_of[e];
        frequencies[slot] = sqrt(curvature / mass) / (2.0 * PI);
        axes[slot] = eigen.eigenvectors.column(e).into_owned();
    }
    Ok(TrapFrequencies {
        frequencies,
        axes,
        hessian: hess,
    })
}

/// Number of log-spaced samples per escape ray.
const RAY_SAMPLES: usize = 96;

/// Largest potential along `origin + s·dir` for `s ∈ (0, s_max]`.
fn ray_barrier(f: &impl Fn(&Vec3) -> f64, origin: &Vec3, dir: &Vec3, s_min: f64, s_max: f64) -> f64 {
    let ratio = ln(s_max / s_min);
    let s_at = |i: usize| s_min * exp(ratio * i as f64 / (RAY_SAMPLES - 1) as f64);
    let values: Vec<f64> = (0..RAY_SAMPLES).map(|i| f(&(origin + dir * s_at(i)))).collect();
    let (imax, vmax) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    if imax == 0 || imax == RAY_SAMPLES - 1 {
        return vmax;
    }
    // golden-section refinement between the neighbouring samples
    let (mut a, mut b) = (s_at(imax - 1), s_at(imax + 1));
    let g = 0.5 * (sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(&(origin + dir * c)), f(&(origin + dir * d)));
    for _ in 0..24 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(&(origin + dir * c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(&(origin + dir * d));
        }
    }
    vmax.max(fc).max(fd)
}

/// Trap depth: the lowest barrier over a fixed family of escape rays (both
/// directions of every principal axis and of the vertical), relative to the
/// potential at `minimum`. Zero means the trap spills along some ray.
pub fn trap_depth(cfg: &TrapConfig, spin: SpinState, minimum: &Vec3, axes: &[Vec3; 3]) -> f64 {
    let f = |p: &Vec3| cfg.potential(p, spin);
    let u0 = f(minimum);
    let mut directions: Vec<Vec3> = Vec::with_capacity(8);
    for a in axes {
        directions.push(*a);
        directions.push(-a);
    }
    let up = Vec3::z();
    if axes.iter().all(|a| a.dot(&up).abs() < 0.999) {
        directions.push(up);
        directions.push(-up);
    }
    let s_min = 0.1 * cfg.hessian_step();
    let s_max = cfg.escape_length();
    directions
        .iter()
        .map(|d| ray_barrier(&f, minimum, d, s_min, s_max) - u0)
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Trap properties at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapCharacterization {
    /// Minimum of the `m_F = 0` potential.
    pub minimum: Vec3,
    /// `m_F = 0` trap frequencies (f_x, f_y, f_z) in Hz.
    pub frequencies: [f64; 3],
    pub axes: [Vec3; 3],
    /// Depth in J, indexed by [`SpinState::index`].
    pub depth: [f64; 3],
}

impl TrapCharacterization {
    pub fn mean_angular_frequency(&self) -> f64 {
        let [fx, fy, fz] = self.frequencies;
        2.0 * PI * libm::cbrt(fx * fy * fz)
    }

    pub fn depth_of(&self, spin: SpinState) -> f64 {
        self.depth[spin.index()]
    }
}

/// Characterises the trap, starting the minimum search at `seed`.
///
/// Frequencies are those of `m_F = 0`. The `m_F = ±1` levels (identical in
/// the magnitude model) get their own minimum; if that search finds no
/// bounded minimum their depth is zero. Their escape rays reuse the `m_F = 0`
/// principal axes.
pub fn characterize(cfg: &TrapConfig, seed: Vec3, search: MinimumSearch) -> Result<TrapCharacterization> {
    let minimum = find_minimum_with(cfg, SpinState::Zero, seed, search)?;
    let freqs = trap_frequencies(cfg, SpinState::Zero, &minimum)?;
    let depth_zero = trap_depth(cfg, SpinState::Zero, &minimum, &freqs.axes);
    let depth_pm = if cfg.gradient == 0.0 {
        depth_zero
    } else {
        match find_minimum_with(cfg, SpinState::Plus, minimum, search) {
            Ok(m) => trap_depth(cfg, SpinState::Plus, &m, &freqs.axes),
            Err(e) if e.is_untrapped() => 0.0,
            Err(Error::NotConverged { .. }) => 0.0,
            Err(e) => return Err(e),
        }
    };
    Ok(TrapCharacterization {
        minimum,
        frequencies: freqs.frequencies,
        axes: freqs.axes,
        depth: [depth_pm, depth_zero, depth_pm],
    })
}

#[cfg(test)]
mod tests;
