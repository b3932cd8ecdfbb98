use alloc::vec::Vec;

use super::{de_optimize_with, DeConfig, DeResult, Evaluator, EvaporationSpace, Parameter, ParameterSpace};
use crate::evaporation::{
    load_from_molasses, run_schedule, CloudState, Controls, LoadingOptions, Molasses, RampSchedule, RunOptions,
    TrapSetup,
};
use crate::math::exp;
use crate::{Result, Vec3};

/// Stage-2 problem: evaporate a fixed initial cloud through schedules drawn
/// from `space`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaporationProblem {
    pub setup: TrapSetup,
    pub space: EvaporationSpace,
    pub initial: CloudState,
    pub options: RunOptions,
}

impl EvaporationProblem {
    /// Condensed atoms at the end of `schedule`; failed runs score zero.
    pub fn condensed_atoms(&self, schedule: &RampSchedule) -> f64 {
        match run_schedule(&self.setup, schedule, &self.initial, &self.options) {
            Ok(t) => t.last().map_or(0.0, |p| p.condensed_atoms()),
            Err(_) => 0.0,
        }
    }
}

/// Condensed atom number `N_tot · f_c` at the fixed end configuration for
/// the schedule encoded by `params`. Anything that fails scores zero.
pub fn objective_final_atoms(problem: &EvaporationProblem, params: &[f64]) -> f64 {
    match problem.space.decode(params) {
        Ok(schedule) => problem.condensed_atoms(&schedule),
        Err(_) => 0.0,
    }
}

/// Laser-cooling settings that are not simulated. Powers are fractions of
/// the available power, detunings are in Hz (cooling in units of the
/// natural linewidth).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolassesSettings {
    pub cooling_power: f64,
    pub cooling_detuning: f64,
    pub repump_power: f64,
    pub repump_detuning: f64,
    pub pump_power: f64,
    pub pump_detuning: f64,
    /// Molasses duration in s.
    pub duration: f64,
}

impl Default for MolassesSettings {
    fn default() -> Self {
        Self {
            cooling_power: 0.5,
            cooling_detuning: -8.0,
            repump_power: 0.5,
            repump_detuning: 0.0,
            pump_power: 0.5,
            pump_detuning: 0.0,
            duration: 0.031,
        }
    }
}

/// Synthetic smooth map from laser settings to the molasses cloud. Not a
/// laser-cooling model: it only gives the loading stage a plausible
/// landscape (colder needs less light and more detuning, which costs atoms;
/// off-resonant repumping or pumping costs atoms; time cools but loses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolassesSurrogate {
    pub mot_atoms: f64,
    pub mot_temperature: f64,
    /// Temperature floor in K.
    pub floor: f64,
    /// Sub-Doppler slope: T_eq = floor + slope · power / |detuning|.
    pub slope: f64,
    pub cooling_time: f64,
    pub loss_time: f64,
    /// Half-width of the repump/pump resonances in Hz.
    pub resonance_width: f64,
    pub radius: f64,
}

impl Default for MolassesSurrogate {
    fn default() -> Self {
        Self {
            mot_atoms: 4e9,
            mot_temperature: 150e-6,
            floor: 2e-6,
            slope: 250e-6,
            cooling_time: 5e-3,
            loss_time: 0.25,
            resonance_width: 3e6,
            radius: 1e-3,
        }
    }
}

impl MolassesSurrogate {
    pub fn molasses(&self, s: &MolassesSettings) -> Molasses {
        let detuning = s.cooling_detuning.abs().max(0.5);
        let t_eq = self.floor + self.slope * s.cooling_power / detuning;
        let temperature = t_eq + (self.mot_temperature - t_eq) * exp(-s.duration / self.cooling_time);
        let lorentz = |d: f64| 1.0 / (1.0 + (d / self.resonance_width) * (d / self.resonance_width));
        let saturate = |p: f64, p_sat: f64| p / (p + p_sat);
        // weak light far detuned cannot hold the cloud
        let capture = saturate(s.cooling_power, 0.02 * detuning);
        let atoms = self.mot_atoms
            * capture
            * saturate(s.repump_power, 0.05)
            * lorentz(s.repump_detuning)
            * saturate(s.pump_power, 0.02)
            * lorentz(s.pump_detuning)
            * exp(-s.duration / self.loss_time);
        Molasses {
            atoms,
            temperature,
            radius: self.radius,
        }
    }
}

/// Loading-era choices: laser settings, initial beam controls and focus
/// offsets (vertical for both beams, axial for beam 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadingSettings {
    pub molasses: MolassesSettings,
    pub power: [f64; 2],
    pub stroke: [f64; 2],
    pub focus_z: [f64; 2],
    pub focus_axial_2: f64,
}

/// Stage-1 space of 14 parameters: seven laser settings and seven trap
/// settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingSpace {
    pub space: ParameterSpace,
}

impl LoadingSpace {
    pub fn new(max_power: [f64; 2], max_stroke: [f64; 2]) -> Self {
        let p = Parameter::new;
        Self {
            space: ParameterSpace::new(alloc::vec![
                p("cooling_power", 0.05, 1.0, "1"),
                p("cooling_detuning", -20.0, -2.0, "Gamma"),
                p("repump_power", 0.0, 1.0, "1"),
                p("repump_detuning", -10e6, 10e6, "Hz"),
                p("pump_power", 0.0, 1.0, "1"),
                p("pump_detuning", -10e6, 10e6, "Hz"),
                p("molasses_duration", 1e-3, 50e-3, "s"),
                p("P1", 0.1 * max_power[0], max_power[0], "W"),
                p("P2", 0.1 * max_power[1], max_power[1], "W"),
                p("xs1", 0.0, max_stroke[0], "m"),
                p("xs2", 0.0, max_stroke[1], "m"),
                p("dz1", -20e-6, 20e-6, "m"),
                p("dz2", -20e-6, 20e-6, "m"),
                p("dy2", -200e-6, 200e-6, "m"),
            ]),
        }
    }

    pub fn decode(&self, params: &[f64]) -> Result<LoadingSettings> {
        self.space.check(params)?;
        Ok(LoadingSettings {
            molasses: MolassesSettings {
                cooling_power: params[0],
                cooling_detuning: params[1],
                repump_power: params[2],
                repump_detuning: params[3],
                pump_power: params[4],
                pump_detuning: params[5],
                duration: params[6],
            },
            power: [params[7], params[8]],
            stroke: [params[9], params[10]],
            focus_z: [params[11], params[12]],
            focus_axial_2: params[13],
        })
    }

    pub fn encode(&self, s: &LoadingSettings) -> Result<Vec<f64>> {
        let m = &s.molasses;
        let params = alloc::vec![
            m.cooling_power,
            m.cooling_detuning,
            m.repump_power,
            m.repump_detuning,
            m.pump_power,
            m.pump_detuning,
            m.duration,
            s.power[0],
            s.power[1],
            s.stroke[0],
            s.stroke[1],
            s.focus_z[0],
            s.focus_z[1],
            s.focus_axial_2,
        ];
        self.space.check(&params)?;
        Ok(params)
    }
}

/// Everything both stages need. Stage 1 scores the atom number left after
/// loading and a `loading_hold` at the loading controls; stage 2 then
/// optimises the evaporation from that state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageProblem {
    /// Base geometry; stage 1 shifts the beam foci.
    pub setup: TrapSetup,
    /// Evaporation template; stage 1 replaces its initial powers and strokes.
    pub schedule: RampSchedule,
    pub surrogate: MolassesSurrogate,
    pub loading: LoadingOptions,
    pub loading_hold: f64,
    pub options: RunOptions,
    /// Run options while scoring stage 1.
    pub loading_options: RunOptions,
    pub stage1: LoadingSpace,
}

impl TwoStageProblem {
    pub fn setup_for(&self, s: &LoadingSettings) -> TrapSetup {
        let mut setup = self.setup.clone();
        setup.beams[0].focus += Vec3::z() * s.focus_z[0];
        setup.beams[1].focus += Vec3::z() * s.focus_z[1] + setup.beams[1].axis * s.focus_axial_2;
        setup
    }

    pub fn loading_controls(&self, s: &LoadingSettings) -> Controls {
        Controls {
            power: s.power,
            stroke: s.stroke,
            gradient: self.schedule.initial.gradient,
        }
    }

    /// Cloud captured with `s`, at t = 0.
    pub fn load(&self, s: &LoadingSettings) -> Result<CloudState> {
        let setup = self.setup_for(s);
        let cfg = setup.trap_at(&self.loading_controls(s))?;
        let molasses = self.surrogate.molasses(&s.molasses);
        load_from_molasses(&cfg, &molasses, &self.loading)
    }

    /// Stage-1 score: atoms left after loading and holding. Failures score 0.
    pub fn loading_objective(&self, params: &[f64]) -> f64 {
        let score = || -> Result<f64> {
            let s = self.stage1.decode(params)?;
            let initial = self.load(&s)?;
            if initial.total() == 0.0 {
                return Ok(0.0);
            }
            let hold = RampSchedule {
                initial: self.loading_controls(&s),
                segments: Vec::new(),
                hold: self.loading_hold,
                ramp_up: 0.0,
                ramp_up_power: [0.0; 2],
            };
            let t = run_schedule(&self.setup_for(&s), &hold, &initial, &self.loading_options)?;
            Ok(t.last().map_or(0.0, |p| p.state.total()))
        };
        score().unwrap_or(0.0)
    }

    /// Stage-2 problem built on the stage-1 choice `s`.
    pub fn evaporation_problem(&self, s: &LoadingSettings) -> Result<EvaporationProblem> {
        let setup = self.setup_for(s);
        let mut template = self.schedule.clone();
        template.initial.power = s.power;
        template.initial.stroke = s.stroke;
        if let Some(first) = template.segments.first_mut() {
            first.start.power = s.power;
            first.start.stroke = s.stroke;
        }
        let limits = super::ControlLimits::from_controls(&self.schedule.initial);
        let space = EvaporationSpace::new(&template, limits)?;
        let initial = self.load(s)?;
        Ok(EvaporationProblem {
            setup,
            space,
            initial,
            options: self.options,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageResult {
    pub stage1: DeResult,
    pub loading: LoadingSettings,
    pub problem: EvaporationProblem,
    pub stage2: DeResult,
}

/// Runs stage 1 over [`LoadingSpace`], freezes its best point, then runs
/// stage 2 over the evaporation space built from it.
pub fn two_stage_optimize(
    problem: &TwoStageProblem,
    stage1: &DeConfig,
    stage2: &DeConfig,
    evaluator: &dyn Evaluator,
) -> Result<TwoStageResult> {
    let first = de_optimize_with(&|p| problem.loading_objective(p), &problem.stage1.space, stage1, evaluator)?;
    let loading = problem.stage1.decode(&first.best)?;
    let evap = problem.evaporation_problem(&loading)?;
    let second = de_optimize_with(&|p| objective_final_atoms(&evap, p), &evap.space.space, stage2, evaluator)?;
    Ok(TwoStageResult {
        stage1: first,
        loading,
        problem: evap,
        stage2: second,
    })
}
