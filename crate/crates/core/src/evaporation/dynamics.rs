use core::f64::consts::PI;

use super::CloudState;
use crate::math::{exp, powi, sqrt};
use crate::trap::TrapCharacterization;
use crate::{Error, PhysicalConstants, Result};

/// Coefficients of the truncated-Boltzmann evaporation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaporationModel {
    /// γ_el = prefactor · n0 σ v̄.
    pub collision_prefactor: f64,
    /// Evaporation rate = coefficient · (η - offset) e^{-η} γ_el.
    pub loss_coefficient: f64,
    pub eta_offset: f64,
    /// At or below this η, the spill model replaces the closed form.
    pub spill_threshold: f64,
    /// Width in η above the threshold over which the closed form is blended
    /// in (C¹ smoothstep). Zero is a hard switch.
    pub switch_width: f64,
    /// One-body lifetime in s; infinite disables background loss.
    pub background_lifetime: f64,
    /// Three-body coefficient L3 in m⁶/s; `None` disables the term.
    pub three_body: Option<f64>,
}

impl Default for EvaporationModel {
    fn default() -> Self {
        Self {
            collision_prefactor: 0.5,
            loss_coefficient: 2.0,
            eta_offset: 4.0,
            spill_threshold: 4.0,
            switch_width: 0.5,
            background_lifetime: 10.0,
            three_body: None,
        }
    }
}

impl EvaporationModel {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        if !nonneg(self.collision_prefactor) || !nonneg(self.loss_coefficient) {
            return Err(Error::invalid("evaporation model", "coefficients must be finite and >= 0"));
        }
        if !(self.eta_offset.is_finite() && self.spill_threshold >= self.eta_offset) {
            return Err(Error::invalid(
                "spill_threshold",
                "must be finite and >= eta_offset",
            ));
        }
        if !(self.switch_width >= 0.0 && self.switch_width.is_finite()) {
            return Err(Error::invalid("switch_width", "must be finite and >= 0"));
        }
        if !(self.background_lifetime > 0.0) {
            return Err(Error::invalid("background_lifetime", "must be > 0"));
        }
        if let Some(l3) = self.three_body {
            if !nonneg(l3) {
                return Err(Error::invalid("three_body", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Per-atom evaporation rate and that rate times the fractional
    /// temperature change per unit fractional loss, for one spin at
    /// truncation `eta`.
    ///
    /// Both vanish-or-jump at the threshold in the pure models (the
    /// closed-form energy term stays finite as η approaches the offset), so
    /// the closed form is blended in over `switch_width` to keep the
    /// right-hand side continuous.
    fn removal(&self, eta: f64, gamma_el: f64, trap_frequency: f64) -> (f64, f64) {
        let spill = || {
            let eta = eta.max(0.0);
            let q3 = crate::math::upper_gamma_q(3, eta);
            let q4 = crate::math::upper_gamma_q(4, eta);
            // mean energy above the depth is 3 k_B T Q(4,η)/Q(3,η)
            (trap_frequency * q3, trap_frequency * (q4 - q3))
        };
        if eta <= self.spill_threshold {
            return spill();
        }
        let a = self.eta_offset;
        // (η - a) e^{-η} peaks at η = a + 1; below that the peak value is
        // used so a shallower trap never loses atoms more slowly
        let e = eta.max(a + 1.0);
        let rate = self.loss_coefficient * (e - a) * exp(-e) * gamma_el;
        // (η + η̃)/3 - 1 with η̃ = (η - a - 1)/(η - a), multiplied through by
        // (η - a) so it stays finite as η approaches the offset
        let weighted = (e - a) * (e / 3.0 - 1.0) + (e - a - 1.0) / 3.0;
        let closed = (rate, self.loss_coefficient * exp(-e) * gamma_el * weighted);
        let x = if self.switch_width > 0.0 {
            ((eta - self.spill_threshold) / self.switch_width).min(1.0)
        } else {
            1.0
        };
        if x >= 1.0 {
            return closed;
        }
        let w = x * x * (3.0 - 2.0 * x);
        let (r_s, e_s) = spill();
        (w * closed.0 + (1.0 - w) * r_s, w * closed.1 + (1.0 - w) * e_s)
    }
}

/// Mean angular trap frequency and per-spin depths at one instant, or their
/// time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSnapshot {
    pub mean_angular_frequency: f64,
    /// Depth in J indexed like [`CloudState::atoms`].
    pub depth: [f64; 3],
}

impl TrapSnapshot {
    pub const STATIC: TrapSnapshot = TrapSnapshot {
        mean_angular_frequency: 0.0,
        depth: [0.0; 3],
    };

    /// Rate of change between `self` and `later`, `dt` apart. Infinite depths
    /// that stay infinite have zero rate.
    pub fn rate_to(&self, later: &TrapSnapshot, dt: f64) -> TrapSnapshot {
        let slope = |a: f64, b: f64| if a == b { 0.0 } else { (b - a) / dt };
        TrapSnapshot {
            mean_angular_frequency: slope(self.mean_angular_frequency, later.mean_angular_frequency),
            depth: [
                slope(self.depth[0], later.depth[0]),
                slope(self.depth[1], later.depth[1]),
                slope(self.depth[2], later.depth[2]),
            ],
        }
    }

    /// Linear extrapolation by `tau` along `rate`, clamped at zero.
    pub fn advanced(&self, rate: &TrapSnapshot, tau: f64) -> TrapSnapshot {
        let step = |a: f64, r: f64| if r == 0.0 { a } else { (a + r * tau).max(0.0) };
        TrapSnapshot {
            mean_angular_frequency: step(self.mean_angular_frequency, rate.mean_angular_frequency),
            depth: [
                step(self.depth[0], rate.depth[0]),
                step(self.depth[1], rate.depth[1]),
                step(self.depth[2], rate.depth[2]),
            ],
        }
    }
}

impl From<&TrapCharacterization> for TrapSnapshot {
    fn from(c: &TrapCharacterization) -> Self {
        Self {
            mean_angular_frequency: c.mean_angular_frequency(),
            depth: c.depth,
        }
    }
}

/// Peak density `N ω̄³ (m / 2π k_B T)^{3/2}`, mean thermal speed, and the
/// elastic collision rate.
pub fn collision_rate(
    total_atoms: f64,
    temperature: f64,
    mean_angular_frequency: f64,
    model: &EvaporationModel,
    constants: &PhysicalConstants,
) -> f64 {
    let kt = constants.boltzmann * temperature;
    let n0 = peak_density(total_atoms, temperature, mean_angular_frequency, constants);
    let v_bar = sqrt(8.0 * kt / (PI * constants.mass));
    model.collision_prefactor * n0 * constants.collision_cross_section() * v_bar
}

pub fn peak_density(
    total_atoms: f64,
    temperature: f64,
    mean_angular_frequency: f64,
    constants: &PhysicalConstants,
) -> f64 {
    let kt = constants.boltzmann * temperature;
    let x = constants.mass / (2.0 * PI * kt);
    total_atoms * powi(mean_angular_frequency, 3) * x * sqrt(x)
}

/// `y = [N_-1, N_0, N_+1, T]`.
fn derivative(
    y: &[f64; 4],
    trap: &TrapSnapshot,
    rate: &TrapSnapshot,
    model: &EvaporationModel,
    constants: &PhysicalConstants,
) -> [f64; 4] {
    let t = y[3];
    let total = y[0] + y[1] + y[2];
    let w = trap.mean_angular_frequency;
    let adiabatic = if w > 0.0 { rate.mean_angular_frequency / w } else { 0.0 };
    let mut dy = [0.0; 4];
    if !(t > 0.0) {
        return dy;
    }
    let one_body = 1.0 / model.background_lifetime;
    let kt = constants.boltzmann * t;
    let gamma = collision_rate(total, t, w, model, constants);
    let (three_body, three_body_heating) = match model.three_body {
        Some(l3) if total > 0.0 => {
            let n0 = peak_density(total, t, w, constants);
            // ⟨n²⟩ for a harmonic Boltzmann cloud is n0²/3^{3/2}
            let loss = l3 * n0 * n0 / (3.0 * sqrt(3.0));
            (loss, loss / 3.0)
        }
        _ => (0.0, 0.0),
    };
    let mut heating = adiabatic + three_body_heating;
    for i in 0..3 {
        let eta = trap.depth[i] / kt;
        let (r_ev, r_energy) = if eta.is_infinite() {
            (0.0, 0.0)
        } else {
            model.removal(eta, gamma, w / (2.0 * PI))
        };
        dy[i] = -y[i] * (r_ev + one_body + three_body);
        if total > 0.0 {
            heating -= y[i] / total * r_energy;
        }
    }
    dy[3] = t * heating;
    dy
}

/// Advances `state` by `dt` with one classical fourth-order Runge-Kutta step,
/// taking the trap at time `state.time + τ` as `trap + τ · rate`.
pub fn evaporation_step(
    state: &CloudState,
    trap: &TrapSnapshot,
    rate: &TrapSnapshot,
    dt: f64,
    model: &EvaporationModel,
    constants: &PhysicalConstants,
) -> Result<CloudState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    if !(trap.mean_angular_frequency >= 0.0) {
        return Err(Error::invalid("trap frequency", "must be >= 0"));
    }
    let y0 = [state.atoms[0], state.atoms[1], state.atoms[2], state.temperature];
    let f = |y: &[f64; 4], tau: f64| derivative(y, &trap.advanced(rate, tau), rate, model, constants);
    let axpy = |y: &[f64; 4], k: &[f64; 4], h: f64| core::array::from_fn::<f64, 4, _>(|i| y[i] + h * k[i]);

    let k1 = f(&y0, 0.0);
    let k2 = f(&axpy(&y0, &k1, 0.5 * dt), 0.5 * dt);
    let k3 = f(&axpy(&y0, &k2, 0.5 * dt), 0.5 * dt);
    let k4 = f(&axpy(&y0, &k3, dt), dt);
    let y: [f64; 4] = core::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));

    if !(y[3] > 0.0) {
        return Err(Error::NonPositiveTemperature { temperature: y[3] });
    }
    Ok(CloudState {
        atoms: [y[0].max(0.0), y[1].max(0.0), y[2].max(0.0)],
        temperature: y[3],
        time: state.time + dt,
    })
}

/// Integrates over `duration` in equal steps of at most `dt`, the trap
/// moving linearly from `trap` along `rate`.
pub fn evolve(
    state: &CloudState,
    trap: &TrapSnapshot,
    rate: &TrapSnapshot,
    duration: f64,
    dt: f64,
    model: &EvaporationModel,
    constants: &PhysicalConstants,
) -> Result<CloudState> {
    if !(dt > 0.0 && duration >= 0.0) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    let steps = libm::ceil(duration / dt * (1.0 - 1e-12)) as usize;
    let h = if steps > 0 { duration / steps as f64 } else { 0.0 };
    let mut s = *state;
    for k in 0..steps {
        s = evaporation_step(&s, &trap.advanced(rate, k as f64 * h), rate, h, model, constants)?;
    }
    s.time = state.time + duration;
    Ok(s)
}
