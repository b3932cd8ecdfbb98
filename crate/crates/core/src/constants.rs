//! Physical constants and species data.

/// Riemann zeta(3), the condensation threshold of phase-space density in a
/// three-dimensional harmonic trap.
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const STANDARD_GRAVITY: f64 = 9.806_65;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Potential energy per unit intensity for ground-state 87Rb at 1064 nm,
/// in J/(W/m²).
///
/// Evaluated once from the far-detuned dipole potential summed over the D1
/// and D2 lines (line strengths 1/3 and 2/3), keeping the counter-rotating
/// terms, for linear polarisation. Corresponds to about -1.52 mK·k_B per
/// 1e10 W/m².
pub const RB87_DIPOLE_COEFFICIENT_1064NM: f64 = -2.103_430_324_967_866e-36;

/// Species and environment constants entering every potential and collision
/// rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Atomic mass in kg.
    pub mass: f64,
    /// s-wave scattering length in m.
    pub scattering_length: f64,
    /// Dipole potential per intensity, J/(W/m²). Negative for red detuning.
    pub dipole_coefficient: f64,
    pub boltzmann: f64,
    pub hbar: f64,
    /// Gravitational acceleration in m/s².
    pub gravity: f64,
    pub bohr_magneton: f64,
    /// Magnitude of the hyperfine Landé factor.
    pub lande_g_f: f64,
}

impl PhysicalConstants {
    /// 87Rb in F=1, trapped with 1064 nm light.
    pub fn rubidium_87() -> Self {
        Self {
            mass: 86.909_180_527 * ATOMIC_MASS_UNIT,
            scattering_length: 100.4 * BOHR_RADIUS,
            dipole_coefficient: RB87_DIPOLE_COEFFICIENT_1064NM,
            boltzmann: BOLTZMANN,
            hbar: HBAR,
            gravity: STANDARD_GRAVITY,
            bohr_magneton: BOHR_MAGNETON,
            lande_g_f: 0.5,
        }
    }

    /// Elastic cross-section for identical bosons, 8πa².
    pub fn collision_cross_section(&self) -> f64 {
        8.0 * core::f64::consts::PI * self.scattering_length * self.scattering_length
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("mass", self.mass),
            ("boltzmann", self.boltzmann),
            ("hbar", self.hbar),
            ("gravity", self.gravity),
            ("bohr_magneton", self.bohr_magneton),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(crate::Error::invalid(name, "must be positive"));
            }
        }
        if !(self.scattering_length > 0.0) {
            return Err(crate::Error::invalid("scattering_length", "must be positive"));
        }
        if !(self.dipole_coefficient < 0.0) {
            return Err(crate::Error::invalid(
                "dipole_coefficient",
                "must be negative (red-detuned trap)",
            ));
        }
        if !(self.lande_g_f >= 0.0) {
            return Err(crate::Error::invalid("lande_g_f", "must be non-negative"));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::rubidium_87()
    }
}
