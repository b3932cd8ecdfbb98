#![allow(non_snake_case)]

//! The JSON run configuration.
//!
//! Every dimensioned key carries its unit as a suffix. Unknown keys are
//! rejected. Every section has defaults, so `{}` describes the reference
//! crossed trap with the reference schedule.

use std::path::Path;

use paintrap_core::evaporation::{
    presets, CloudState, Controls, CycleOverheads, EvaporationModel, LoadingOptions, Molasses,
    RampSchedule, RampSegment, RunOptions, TrapSetup,
};
use paintrap_core::optics::Beam;
use paintrap_core::optimizer::{DeConfig, MolassesSettings, MolassesSurrogate};
use paintrap_core::painting::{DwellDensity, DwellShape, PaintingSpec};
use paintrap_core::trap::MinimumSearch;
use paintrap_core::{PhysicalConstants, Vec3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default = "default_beams")]
    pub beams: [BeamConfig; 2],
    #[serde(default)]
    pub trap: TrapConfigSection,
    #[serde(default)]
    pub painting: PaintingConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub overheads: OverheadsConfig,
    /// Molasses cloud. Mutually exclusive with `laser_cooling`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molasses: Option<MolassesConfig>,
    /// Laser settings mapped to the molasses cloud by the synthetic
    /// surrogate. Mutually exclusive with `molasses`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laser_cooling: Option<LaserCoolingConfig>,
    #[serde(default)]
    pub loading: LoadingConfig,
    /// Explicit initial cloud; replaces the loading model when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateConfig>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            constants: ConstantsConfig::default(),
            beams: default_beams(),
            trap: TrapConfigSection::default(),
            painting: PaintingConfig::default(),
            schedule: ScheduleConfig::default(),
            overheads: OverheadsConfig::default(),
            molasses: None,
            laser_cooling: None,
            loading: LoadingConfig::default(),
            initial_state: None,
            model: ModelConfig::default(),
            integration: IntegrationConfig::default(),
            optimizer: OptimizerConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub mass_kg: f64,
    pub scattering_length_m: f64,
    /// Dipole potential per intensity, negative for red detuning.
    pub dipole_coefficient_J_per_W_per_m2: f64,
    pub boltzmann_J_per_K: f64,
    pub hbar_J_s: f64,
    pub gravity_m_per_s2: f64,
    pub bohr_magneton_J_per_T: f64,
    pub lande_g_f: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self::from(&PhysicalConstants::default())
    }
}

impl From<&PhysicalConstants> for ConstantsConfig {
    fn from(c: &PhysicalConstants) -> Self {
        Self {
            mass_kg: c.mass,
            scattering_length_m: c.scattering_length,
            dipole_coefficient_J_per_W_per_m2: c.dipole_coefficient,
            boltzmann_J_per_K: c.boltzmann,
            hbar_J_s: c.hbar,
            gravity_m_per_s2: c.gravity,
            bohr_magneton_J_per_T: c.bohr_magneton,
            lande_g_f: c.lande_g_f,
        }
    }
}

impl ConstantsConfig {
    pub fn to_core(&self) -> PhysicalConstants {
        PhysicalConstants {
            mass: self.mass_kg,
            scattering_length: self.scattering_length_m,
            dipole_coefficient: self.dipole_coefficient_J_per_W_per_m2,
            boltzmann: self.boltzmann_J_per_K,
            hbar: self.hbar_J_s,
            gravity: self.gravity_m_per_s2,
            bohr_magneton: self.bohr_magneton_J_per_T,
            lande_g_f: self.lande_g_f,
        }
    }
}

/// Beam geometry; powers come from the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// 1/e² radius along the paint axis.
    pub waist_x_m: f64,
    pub waist_y_m: f64,
    pub wavelength_m: f64,
    pub axis: [f64; 3],
    pub focus_m: [f64; 3],
    pub paint_axis: [f64; 3],
}

impl From<&Beam> for BeamConfig {
    fn from(b: &Beam) -> Self {
        Self {
            waist_x_m: b.waist_x,
            waist_y_m: b.waist_y,
            wavelength_m: b.wavelength,
            axis: b.axis.into(),
            focus_m: b.focus.into(),
            paint_axis: b.paint_axis.into(),
        }
    }
}

impl BeamConfig {
    pub fn to_core(&self, power: f64) -> Result<Beam> {
        Ok(Beam::new(
            power,
            self.waist_x_m,
            self.waist_y_m,
            self.wavelength_m,
            Vec3::from(self.axis),
            Vec3::from(self.focus_m),
            Vec3::from(self.paint_axis),
        )?)
    }
}

fn default_beams() -> [BeamConfig; 2] {
    let [a, b] = presets::crossed_beams();
    [BeamConfig::from(&a), BeamConfig::from(&b)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeConfig {
    Uniform,
    #[default]
    Parabolic,
}

impl From<ShapeConfig> for DwellShape {
    fn from(s: ShapeConfig) -> Self {
        match s {
            ShapeConfig::Uniform => DwellShape::Uniform,
            ShapeConfig::Parabolic => DwellShape::Parabolic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapConfigSection {
    pub gravity: bool,
    /// Dwell shape of the painted beams during evaporation.
    pub dwell_shape: ShapeConfig,
    pub dwell_cells: usize,
    /// Half-width of the minimum search's initial simplex; null picks half
    /// the smallest waist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_step_m: Option<f64>,
    pub search_tolerance_m: f64,
    pub search_max_iterations: usize,
}

impl Default for TrapConfigSection {
    fn default() -> Self {
        let setup = presets::crossed_setup();
        let search = MinimumSearch::default();
        Self {
            gravity: setup.gravity,
            dwell_shape: ShapeConfig::Parabolic,
            dwell_cells: setup.dwell_cells,
            search_step_m: search.initial_step,
            search_tolerance_m: search.diameter_tolerance,
            search_max_iterations: search.max_iterations,
        }
    }
}

/// Dwell density of a single painted beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DwellConfig {
    Uniform { cells: usize },
    Parabolic { cells: usize },
    /// Explicit per-cell weights over `[-x_s, x_s]`, normalised on load.
    Weights { weights: Vec<f64> },
}

impl DwellConfig {
    pub fn to_core(&self, stroke: f64) -> Result<DwellDensity> {
        let d = match self {
            DwellConfig::Uniform { cells } => DwellShape::Uniform.density(stroke, *cells)?,
            DwellConfig::Parabolic { cells } => DwellShape::Parabolic.density(stroke, *cells)?,
            DwellConfig::Weights { weights } => {
                if weights.is_empty() {
                    return Err(Error::config("painting.dwell.weights is empty"));
                }
                if stroke == 0.0 {
                    DwellDensity::point_mass()
                } else {
                    DwellDensity::from_weights(stroke, weights.clone())?
                }
            }
        };
        Ok(d)
    }
}

/// Single-beam painting study and waveform export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PaintingConfig {
    pub waist_m: f64,
    pub power_W: f64,
    pub wavelength_m: f64,
    pub center_frequency_Hz: f64,
    /// Deflection per RF frequency offset.
    pub calibration_m_per_Hz: f64,
    /// Movement amplitude; the beam sweeps `[-x_s, x_s]`.
    pub stroke_m: f64,
    pub dwell: DwellConfig,
    /// Cases to study; 0 means a static, unmodulated beam.
    pub painting_frequencies_Hz: Vec<f64>,
    /// Period used for the spectrum of the static case.
    pub static_reference_Hz: f64,
    /// Lower bound on samples per period; raised automatically so the
    /// phase step per sample stays below π/4.
    pub samples_per_period: usize,
    pub spectrum_periods: usize,
    /// Trap frequencies the painting must exceed.
    pub trap_frequencies_Hz: [f64; 3],
    pub frequency_margin: f64,
    pub corrugation_threshold: f64,
    pub profile_points: usize,
    pub map_points: usize,
    pub export_frequency_Hz: f64,
    pub export_periods: usize,
}

impl Default for PaintingConfig {
    fn default() -> Self {
        Self {
            waist_m: 5e-6,
            power_W: 0.5,
            wavelength_m: presets::WAVELENGTH,
            center_frequency_Hz: 80e6,
            calibration_m_per_Hz: 1e-11,
            stroke_m: 50e-6,
            dwell: DwellConfig::Uniform { cells: 256 },
            painting_frequencies_Hz: vec![0.0, 5e3, 1e6, 100e3],
            static_reference_Hz: 1e6,
            samples_per_period: 200,
            spectrum_periods: 8,
            trap_frequencies_Hz: [2e3, 150.0, 1e3],
            frequency_margin: 10.0,
            corrugation_threshold: 0.05,
            profile_points: 801,
            map_points: 121,
            export_frequency_Hz: 100e3,
            export_periods: 1,
        }
    }
}

impl PaintingConfig {
    pub fn beam(&self) -> Result<Beam> {
        Ok(Beam::new(
            self.power_W,
            self.waist_m,
            self.waist_m,
            self.wavelength_m,
            Vec3::x(),
            Vec3::zeros(),
            Vec3::y(),
        )?)
    }

    /// Spec of one case; `f_p = 0` is the static beam.
    pub fn spec(&self, painting_frequency: f64) -> Result<PaintingSpec> {
        let (stroke, f_p) = if painting_frequency == 0.0 {
            (0.0, self.static_reference_Hz)
        } else {
            (self.stroke_m, painting_frequency)
        };
        Ok(PaintingSpec::from_stroke(
            stroke,
            self.center_frequency_Hz,
            f_p,
            self.calibration_m_per_Hz,
        )?)
    }

    pub fn dwell_for(&self, painting_frequency: f64) -> Result<DwellDensity> {
        if painting_frequency == 0.0 {
            Ok(DwellDensity::point_mass())
        } else {
            self.dwell.to_core(self.stroke_m)
        }
    }

    /// Samples per period for `spec`: at least the configured value and
    /// enough to keep the phase step per sample at or below π/4.
    pub fn samples_for(&self, spec: &PaintingSpec) -> usize {
        let beta = spec.modulation_amplitude / spec.painting_frequency;
        self.samples_per_period.max((8.0 * beta - 1e-6).ceil() as usize).max(100)
    }

    pub fn validate(&self) -> Result<()> {
        if self.painting_frequencies_Hz.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
            return Err(Error::config("painting frequencies must be finite and >= 0"));
        }
        if self.spectrum_periods == 0 || self.export_periods == 0 {
            return Err(Error::config("spectrum_periods and export_periods must be >= 1"));
        }
        if self.profile_points < 2 || self.map_points < 2 {
            return Err(Error::config("profile_points and map_points must be >= 2"));
        }
        self.beam()?;
        for f in self.painting_frequencies_Hz.iter().copied().chain([self.export_frequency_Hz]) {
            self.spec(f)?;
            self.dwell_for(f)?;
        }
        if !(self.export_frequency_Hz > 0.0) {
            return Err(Error::config("export_frequency_Hz must be > 0"));
        }
        Ok(())
    }
}

/// Powers, strokes and gradient at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsConfig {
    #[serde(rename = "P1_W")]
    pub p1_w: f64,
    #[serde(rename = "P2_W")]
    pub p2_w: f64,
    pub xs1_m: f64,
    pub xs2_m: f64,
    #[serde(rename = "Bp_Tpm")]
    pub bp_tpm: f64,
}

impl From<&Controls> for ControlsConfig {
    fn from(c: &Controls) -> Self {
        Self {
            p1_w: c.power[0],
            p2_w: c.power[1],
            xs1_m: c.stroke[0],
            xs2_m: c.stroke[1],
            bp_tpm: c.gradient,
        }
    }
}

impl From<&ControlsConfig> for Controls {
    fn from(c: &ControlsConfig) -> Self {
        Controls {
            power: [c.p1_w, c.p2_w],
            stroke: [c.xs1_m, c.xs2_m],
            gradient: c.bp_tpm,
        }
    }
}

/// One linear ramp. Without `start` it continues from the previous end; a
/// differing `start` is an explicit jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampConfig {
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<ControlsConfig>,
    pub end: ControlsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub initial: ControlsConfig,
    pub ramps: Vec<RampConfig>,
    pub hold_s: f64,
    pub ramp_up_s: f64,
    pub ramp_up_power_W: [f64; 2],
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self::from(&presets::reference_schedule())
    }
}

impl From<&RampSchedule> for ScheduleConfig {
    fn from(s: &RampSchedule) -> Self {
        let mut previous = s.initial;
        let ramps = s
            .segments
            .iter()
            .map(|seg| {
                let start = (seg.start != previous).then(|| ControlsConfig::from(&seg.start));
                previous = seg.end;
                RampConfig {
                    duration_s: seg.duration,
                    start,
                    end: ControlsConfig::from(&seg.end),
                }
            })
            .collect();
        Self {
            initial: ControlsConfig::from(&s.initial),
            ramps,
            hold_s: s.hold,
            ramp_up_s: s.ramp_up,
            ramp_up_power_W: s.ramp_up_power,
        }
    }
}

impl ScheduleConfig {
    pub fn to_core(&self) -> Result<RampSchedule> {
        let initial = Controls::from(&self.initial);
        let mut previous = initial;
        let segments = self
            .ramps
            .iter()
            .map(|r| {
                let start = r.start.as_ref().map_or(previous, Controls::from);
                let end = Controls::from(&r.end);
                let seg = RampSegment {
                    duration: r.duration_s,
                    start,
                    end,
                    jump: start != previous,
                };
                previous = end;
                seg
            })
            .collect();
        let schedule = RampSchedule {
            initial,
            segments,
            hold: self.hold_s,
            ramp_up: self.ramp_up_s,
            ramp_up_power: self.ramp_up_power_W,
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverheadsConfig {
    pub mot_loading_s: f64,
    pub molasses_s: f64,
    pub detection_s: f64,
    pub other_s: f64,
}

impl Default for OverheadsConfig {
    fn default() -> Self {
        Self::from(&presets::optimization_overheads())
    }
}

impl From<&CycleOverheads> for OverheadsConfig {
    fn from(o: &CycleOverheads) -> Self {
        Self {
            mot_loading_s: o.mot_loading,
            molasses_s: o.molasses,
            detection_s: o.detection,
            other_s: o.other,
        }
    }
}

impl OverheadsConfig {
    pub fn to_core(&self) -> Result<CycleOverheads> {
        let o = CycleOverheads {
            mot_loading: self.mot_loading_s,
            molasses: self.molasses_s,
            detection: self.detection_s,
            other: self.other_s,
        };
        if [o.mot_loading, o.molasses, o.detection, o.other]
            .iter()
            .any(|v| !(*v >= 0.0 && v.is_finite()))
        {
            return Err(Error::config("overheads must be finite and >= 0"));
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MolassesConfig {
    pub atoms: f64,
    pub temperature_K: f64,
    /// 1/e radius.
    pub radius_m: f64,
}

impl From<&Molasses> for MolassesConfig {
    fn from(m: &Molasses) -> Self {
        Self {
            atoms: m.atoms,
            temperature_K: m.temperature,
            radius_m: m.radius,
        }
    }
}

/// Laser settings of the synthetic molasses surrogate. Powers are
/// fractions of the available power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserCoolingConfig {
    pub cooling_power: f64,
    /// In units of the natural linewidth.
    pub cooling_detuning_gamma: f64,
    pub repump_power: f64,
    pub repump_detuning_Hz: f64,
    pub pump_power: f64,
    pub pump_detuning_Hz: f64,
    pub duration_s: f64,
}

impl From<&MolassesSettings> for LaserCoolingConfig {
    fn from(s: &MolassesSettings) -> Self {
        Self {
            cooling_power: s.cooling_power,
            cooling_detuning_gamma: s.cooling_detuning,
            repump_power: s.repump_power,
            repump_detuning_Hz: s.repump_detuning,
            pump_power: s.pump_power,
            pump_detuning_Hz: s.pump_detuning,
            duration_s: s.duration,
        }
    }
}

impl From<&LaserCoolingConfig> for MolassesSettings {
    fn from(c: &LaserCoolingConfig) -> Self {
        MolassesSettings {
            cooling_power: c.cooling_power,
            cooling_detuning: c.cooling_detuning_gamma,
            repump_power: c.repump_power,
            repump_detuning: c.repump_detuning_Hz,
            pump_power: c.pump_power,
            pump_detuning: c.pump_detuning_Hz,
            duration: c.duration_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoadingConfig {
    /// Monte Carlo samples of the capture integral.
    pub samples: usize,
    pub seed: u64,
    /// Calibrated fraction of the geometric capture that survives transfer.
    pub transfer_efficiency: f64,
    /// Hold at the loading controls scored by stage 1.
    pub hold_s: f64,
}

impl Default for LoadingConfig {
    fn default() -> Self {
        let o = presets::loading_options();
        Self {
            samples: o.samples,
            seed: o.seed,
            transfer_efficiency: o.transfer_efficiency,
            hold_s: 0.040,
        }
    }
}

impl LoadingConfig {
    pub fn to_core(&self) -> LoadingOptions {
        LoadingOptions {
            samples: self.samples,
            seed: self.seed,
            transfer_efficiency: self.transfer_efficiency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    /// Atoms in `[m_F=-1, 0, +1]`.
    pub atoms: [f64; 3],
    pub temperature_K: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub collision_prefactor: f64,
    pub loss_coefficient: f64,
    pub eta_offset: f64,
    pub spill_threshold: f64,
    pub switch_width: f64,
    pub background_lifetime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_body_m6_per_s: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let m = EvaporationModel::default();
        Self {
            collision_prefactor: m.collision_prefactor,
            loss_coefficient: m.loss_coefficient,
            eta_offset: m.eta_offset,
            spill_threshold: m.spill_threshold,
            switch_width: m.switch_width,
            background_lifetime_s: m.background_lifetime,
            three_body_m6_per_s: m.three_body,
        }
    }
}

impl ModelConfig {
    pub fn to_core(&self) -> Result<EvaporationModel> {
        let m = EvaporationModel {
            collision_prefactor: self.collision_prefactor,
            loss_coefficient: self.loss_coefficient,
            eta_offset: self.eta_offset,
            spill_threshold: self.spill_threshold,
            switch_width: self.switch_width,
            background_lifetime: self.background_lifetime_s,
            three_body: self.three_body_m6_per_s,
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    pub dt_s: f64,
    pub recharacterize_every_s: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        let o = RunOptions::default();
        Self {
            dt_s: o.dt,
            recharacterize_every_s: o.recharacterize_every,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub population: usize,
    pub weight: f64,
    pub crossover: f64,
    pub generations: usize,
    pub stage1_generations: usize,
    pub seed: u64,
    /// Worker threads for population evaluation; null uses all cores.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let d = DeConfig::default();
        Self {
            population: d.population,
            weight: d.weight,
            crossover: d.crossover,
            generations: d.generations,
            stage1_generations: 20,
            seed: d.seed,
            threads: None,
        }
    }
}

impl OptimizerConfig {
    pub fn de(&self, generations: usize) -> Result<DeConfig> {
        let c = DeConfig {
            population: self.population,
            weight: self.weight,
            crossover: self.crossover,
            generations,
            seed: self.seed,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Overrides every seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.optimizer.seed = seed;
        self.loading.seed = seed;
    }

    /// Checks everything the commands will need to build.
    pub fn validate(&self) -> Result<()> {
        self.constants.to_core().validate()?;
        self.setup()?;
        self.painting.validate()?;
        self.schedule.to_core()?;
        self.overheads.to_core()?;
        self.run_options()?;
        self.molasses()?;
        self.optimizer.de(self.optimizer.generations)?;
        if !(self.loading.transfer_efficiency >= 0.0 && self.loading.transfer_efficiency <= 1.0) {
            return Err(Error::config("loading.transfer_efficiency must be in [0, 1]"));
        }
        if self.loading.samples == 0 {
            return Err(Error::config("loading.samples must be >= 1"));
        }
        if !(self.loading.hold_s >= 0.0) {
            return Err(Error::config("loading.hold_s must be >= 0"));
        }
        if let Some(s) = &self.initial_state {
            self.initial_from(s).validate()?;
        }
        Ok(())
    }

    pub fn setup(&self) -> Result<TrapSetup> {
        let setup = TrapSetup {
            beams: [self.beams[0].to_core(0.0)?, self.beams[1].to_core(0.0)?],
            dwell_shape: self.trap.dwell_shape.into(),
            dwell_cells: self.trap.dwell_cells,
            gravity: self.trap.gravity,
            constants: self.constants.to_core(),
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn search(&self) -> MinimumSearch {
        MinimumSearch {
            initial_step: self.trap.search_step_m,
            diameter_tolerance: self.trap.search_tolerance_m,
            max_iterations: self.trap.search_max_iterations,
        }
    }

    pub fn run_options(&self) -> Result<RunOptions> {
        let i = &self.integration;
        if !(i.dt_s > 0.0 && i.recharacterize_every_s >= i.dt_s) {
            return Err(Error::config(
                "integration needs 0 < dt_s <= recharacterize_every_s",
            ));
        }
        Ok(RunOptions {
            dt: i.dt_s,
            recharacterize_every: i.recharacterize_every_s,
            model: self.model.to_core()?,
            search: self.search(),
        })
    }

    /// The molasses cloud: explicit, from the laser surrogate, or the
    /// reference cloud.
    pub fn molasses(&self) -> Result<Molasses> {
        let m = match (&self.molasses, &self.laser_cooling) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "molasses and laser_cooling are mutually exclusive",
                ))
            }
            (Some(m), None) => Molasses {
                atoms: m.atoms,
                temperature: m.temperature_K,
                radius: m.radius_m,
            },
            (None, Some(l)) => MolassesSurrogate::default().molasses(&MolassesSettings::from(l)),
            (None, None) => presets::molasses(),
        };
        m.validate()?;
        Ok(m)
    }

    fn initial_from(&self, s: &InitialStateConfig) -> CloudState {
        CloudState {
            atoms: s.atoms,
            temperature: s.temperature_K,
            time: 0.0,
        }
    }

    /// Cloud at the start of the schedule: explicit, or loaded from the
    /// molasses into the trap at the initial controls.
    pub fn initial_state(&self) -> Result<CloudState> {
        if let Some(s) = &self.initial_state {
            let state = self.initial_from(s);
            state.validate()?;
            return Ok(state);
        }
        let setup = self.setup()?;
        let schedule = self.schedule.to_core()?;
        let cfg = setup.trap_at(&schedule.initial)?;
        Ok(paintrap_core::evaporation::load_from_molasses(
            &cfg,
            &self.molasses()?,
            &self.loading.to_core(),
        )?)
    }
}
