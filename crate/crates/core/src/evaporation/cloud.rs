use crate::constants::ZETA_3;
use crate::math::{cbrt, powi};
use crate::{Error, PhysicalConstants, Result};

/// Atom numbers per Zeeman level `[m_F=-1, 0, +1]`, a shared temperature
/// and the time they refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudState {
    pub atoms: [f64; 3],
    /// Temperature in K.
    pub temperature: f64,
    pub time: f64,
}

impl CloudState {
    /// `total` atoms split equally over the three levels.
    pub fn unpolarized(total: f64, temperature: f64) -> Self {
        Self {
            atoms: [total / 3.0; 3],
            temperature,
            time: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().sum()
    }

    /// Fraction of atoms in `m_F = 0`; zero for an empty cloud.
    pub fn zero_fraction(&self) -> f64 {
        let n = self.total();
        if n > 0.0 {
            self.atoms[1] / n
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.iter().any(|n| !(*n >= 0.0 && n.is_finite())) {
            return Err(Error::invalid("atom number", "must be finite and >= 0"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::NonPositiveTemperature {
                temperature: self.temperature,
            });
        }
        Ok(())
    }
}

/// Peak phase-space density of a thermal cloud in a harmonic trap,
/// `N (ħω̄ / k_B T)³`.
pub fn psd(state: &CloudState, mean_angular_frequency: f64, constants: &PhysicalConstants) -> f64 {
    let x = constants.hbar * mean_angular_frequency / (constants.boltzmann * state.temperature);
    state.total() * powi(x, 3)
}

/// Ideal-gas condensation figures in a harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecStats {
    /// Critical temperature in K.
    pub critical_temperature: f64,
    pub condensate_fraction: f64,
}

impl BecStats {
    pub fn condensed_atoms(&self, state: &CloudState) -> f64 {
        self.condensate_fraction * state.total()
    }
}

/// `T_c = (ħω̄/k_B)(N/ζ(3))^{1/3}` and `max(0, 1 - (T/T_c)³)`.
pub fn bec_stats(state: &CloudState, mean_angular_frequency: f64, constants: &PhysicalConstants) -> BecStats {
    let n = state.total();
    let critical_temperature =
        constants.hbar * mean_angular_frequency / constants.boltzmann * cbrt(n / ZETA_3);
    let condensate_fraction = if critical_temperature > 0.0 {
        (1.0 - powi(state.temperature / critical_temperature, 3)).max(0.0)
    } else {
        0.0
    };
    BecStats {
        critical_temperature,
        condensate_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rb() -> PhysicalConstants {
        PhysicalConstants::rubidium_87()
    }

    fn state(n: f64, t: f64) -> CloudState {
        CloudState::unpolarized(n, t)
    }

    #[test]
    fn psd_is_linear_in_n() {
        let w = 2.0 * core::f64::consts::PI * 150.0;
        let a = psd(&state(1e5, 200e-9), w, &rb());
        let b = psd(&state(2e5, 200e-9), w, &rb());
        assert!((b / a - 2.0).abs() < 1e-14);
        assert_eq!(psd(&state(1e5, 200e-9), 0.0, &rb()), 0.0);
    }

    #[test]
    fn psd_equals_zeta3_at_critical_temperature() {
        let w = 2.0 * core::f64::consts::PI * 120.0;
        let s = state(6e4, 1.0);
        // textbook oracle: k_B T_c = ħω̄ (N/ζ(3))^{1/3}
        let c = rb();
        let tc = c.hbar * w / c.boltzmann * libm::pow(6e4 / 1.202056903159594, 1.0 / 3.0);
        let at_tc = CloudState { temperature: tc, ..s };
        assert!((psd(&at_tc, w, &c) - 1.202056903159594).abs() < 1e-9);
        let stats = bec_stats(&at_tc, w, &c);
        assert!((stats.critical_temperature / tc - 1.0).abs() < 1e-12);
        assert!(stats.condensate_fraction.abs() < 1e-9);
    }

    #[test]
    fn fraction_limits() {
        let w = 2.0 * core::f64::consts::PI * 120.0;
        let cold = bec_stats(&state(6e4, 1e-15), w, &rb());
        assert!(cold.condensate_fraction > 1.0 - 1e-12);
        let hot = bec_stats(&state(6e4, 1e-3), w, &rb());
        assert_eq!(hot.condensate_fraction, 0.0);
        let empty = bec_stats(&state(0.0, 1e-7), w, &rb());
        assert_eq!(empty.condensate_fraction, 0.0);
    }

    proptest! {
        #[test]
        fn fraction_monotone_in_temperature(t1 in 1e-9f64..1e-6, dt in 0.0f64..1e-6) {
            let w = 2.0 * core::f64::consts::PI * 100.0;
            let a = bec_stats(&state(1e5, t1), w, &rb()).condensate_fraction;
            let b = bec_stats(&state(1e5, t1 + dt), w, &rb()).condensate_fraction;
            prop_assert!(b <= a);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
