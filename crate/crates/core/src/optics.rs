//! Gaussian beam intensity and the optical dipole potential.

use core::f64::consts::PI;

use crate::math::{exp, sqrt};
use crate::{Error, PhysicalConstants, Result, Vec3};

/// A focused, astigmatism-free Gaussian dipole-trap beam.
///
/// `waist_x` is the 1/e² intensity radius along `paint_axis` (horizontal),
/// `waist_y` the one along `axis × paint_axis`. Each transverse direction has
/// its own Rayleigh length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    /// Optical power in W.
    pub power: f64,
    pub waist_x: f64,
    pub waist_y: f64,
    pub wavelength: f64,
    /// Unit propagation direction.
    pub axis: Vec3,
    /// Position of the focus in m.
    pub focus: Vec3,
    /// Unit transverse direction along which the beam is painted.
    pub paint_axis: Vec3,
}

/// Coordinates of a point in the beam frame: along the paint axis, along the
/// second transverse axis, and along propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamCoordinates {
    pub paint: f64,
    pub transverse: f64,
    pub axial: f64,
}

impl Beam {
    pub fn new(
        power: f64,
        waist_x: f64,
        waist_y: f64,
        wavelength: f64,
        axis: Vec3,
        focus: Vec3,
        paint_axis: Vec3,
    ) -> Result<Self> {
        let beam = Self {
            power,
            waist_x,
            waist_y,
            wavelength,
            axis,
            focus,
            paint_axis,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(Error::invalid("beam power", "must be finite and >= 0"));
        }
        if !(self.waist_x > 0.0 && self.waist_y > 0.0) {
            return Err(Error::invalid("beam waist", "must be > 0"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::invalid("beam wavelength", "must be > 0"));
        }
        const TOL: f64 = 1e-9;
        if (self.axis.norm() - 1.0).abs() > TOL || (self.paint_axis.norm() - 1.0).abs() > TOL {
            return Err(Error::invalid("beam axes", "must be unit vectors"));
        }
        if self.axis.dot(&self.paint_axis).abs() > TOL {
            return Err(Error::invalid(
                "beam axes",
                "paint axis must be orthogonal to propagation axis",
            ));
        }
        Ok(())
    }

    /// Second transverse unit vector, `axis × paint_axis`.
    pub fn transverse_axis(&self) -> Vec3 {
        self.axis.cross(&self.paint_axis)
    }

    pub fn rayleigh_length_x(&self) -> f64 {
        PI * self.waist_x * self.waist_x / self.wavelength
    }

    pub fn rayleigh_length_y(&self) -> f64 {
        PI * self.waist_y * self.waist_y / self.wavelength
    }

    /// Peak intensity at the focus, 2P/(π wx wy).
    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power / (PI * self.waist_x * self.waist_y)
    }

    pub fn local_coordinates(&self, point: &Vec3) -> BeamCoordinates {
        let d = point - self.focus;
        BeamCoordinates {
            paint: d.dot(&self.paint_axis),
            transverse: d.dot(&self.transverse_axis()),
            axial: d.dot(&self.axis),
        }
    }

    /// Beam radii (along paint axis, along transverse axis) at axial offset z.
    pub fn radii_at(&self, axial: f64) -> (f64, f64) {
        let zx = axial / self.rayleigh_length_x();
        let zy = axial / self.rayleigh_length_y();
        (
            self.waist_x * sqrt(1.0 + zx * zx),
            self.waist_y * sqrt(1.0 + zy * zy),
        )
    }

    /// Intensity in W/m² at `point`.
    pub fn intensity(&self, point: &Vec3) -> f64 {
        let c = self.local_coordinates(point);
        let (wx, wy) = self.radii_at(c.axial);
        2.0 * self.power / (PI * wx * wy)
            * exp(-2.0 * c.paint * c.paint / (wx * wx) - 2.0 * c.transverse * c.transverse / (wy * wy))
    }
}

/// Intensity of `beam` at `point`.
pub fn gaussian_intensity(beam: &Beam, point: &Vec3) -> f64 {
    beam.intensity(point)
}

/// Dipole potential energy for a given intensity, `c_dip · I`.
pub fn dipole_potential(intensity: f64, constants: &PhysicalConstants) -> f64 {
    constants.dipole_coefficient * intensity
}
