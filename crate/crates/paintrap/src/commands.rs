#![allow(non_snake_case)]

//! The command implementations behind the CLI. Each writes its files into
//! an output directory and returns a summary for the caller to print.

use std::path::{Path, PathBuf};

use paintrap_core::evaporation::{cycle_time, run_schedule};
use paintrap_core::optimizer::{
    de_optimize_with, objective_final_atoms, two_stage_optimize, ControlLimits, DeConfig, DeResult, Evaluator,
    EvaporationProblem, EvaporationSpace, LoadingSettings, LoadingSpace, MolassesSurrogate, ParameterSpace,
    TwoStageProblem,
};
use paintrap_core::painting::{
    comb_intensity, frequency_trajectory, sideband_comb, sideband_fragmentation, validate_painting, PaintedBeam,
    PaintingWarning,
};
use paintrap_core::trap::{characterize, SpinState};
use paintrap_core::Vec3;
use serde::Serialize;

use crate::config::{BeamConfig, LaserCoolingConfig, RunConfig, ScheduleConfig};
use crate::formats::{
    iq_bytes, write_bytes, write_columns, write_file, write_run_record_csv, write_trajectory_csv,
    write_waveform_csv,
};
use crate::parallel::Parallel;
use crate::spectrum::rf_spectrum;
use crate::{Error, Result};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialises");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Outcome of one painting case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaintCase {
    pub label: String,
    /// 0 for the static beam.
    pub painting_frequency_Hz: f64,
    pub well_spacing_m: f64,
    pub corrugation: f64,
    pub regime: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaintReport {
    pub cases: Vec<PaintCase>,
}

fn case_label(f_p: f64) -> String {
    if f_p == 0.0 {
        "static".to_string()
    } else {
        format!("fp_{}Hz", f_p)
    }
}

fn warning_text(w: &PaintingWarning) -> String {
    match w {
        PaintingWarning::TooSlow {
            painting_frequency,
            max_trap_frequency,
            margin,
        } => format!(
            "too_slow: f_p = {painting_frequency} Hz < {margin} x {max_trap_frequency} Hz"
        ),
        PaintingWarning::Fragmented {
            corrugation,
            threshold,
        } => format!("fragmented: corrugation {corrugation:.4} > {threshold}"),
    }
}

/// Spectrum, averaged and sideband-resolved intensity profiles and the
/// corrugation of each configured painting frequency.
pub fn paint(cfg: &RunConfig, out: &Path) -> Result<PaintReport> {
    let p = &cfg.painting;
    p.validate()?;
    ensure_dir(out)?;
    let beam = p.beam()?;
    let i0 = beam.peak_intensity();
    let mut cases = Vec::new();
    for &f_p in &p.painting_frequencies_Hz {
        let label = case_label(f_p);
        let spec = p.spec(f_p)?;
        let dwell = p.dwell_for(f_p)?;
        let n = p.samples_for(&spec);
        let waveform = frequency_trajectory(&dwell, &spec, n as f64 * spec.painting_frequency)?;

        let spectrum = rf_spectrum(&waveform, p.spectrum_periods)?;
        write_file(&out.join(format!("spectrum_{label}.csv")), |w| {
            write_columns(&["f_Hz", "amplitude"], &[&spectrum.frequency, &spectrum.amplitude], w)
        })?;

        let comb = sideband_comb(&waveform);
        let painted = PaintedBeam::new(beam, dwell.clone());
        let reach = dwell.half_width() + 3.0 * p.waist_m;
        let grid = |m: usize, half: f64| -> Vec<f64> {
            (0..m).map(|i| -half + 2.0 * half * i as f64 / (m - 1) as f64).collect()
        };
        // the beam propagates along x and is painted along y
        let xs = grid(p.profile_points, reach);
        let static_i: Vec<f64> = xs.iter().map(|x| beam.intensity(&Vec3::new(0.0, *x, 0.0))).collect();
        let averaged: Vec<f64> = xs.iter().map(|x| painted.intensity(&Vec3::new(0.0, *x, 0.0))).collect();
        let resolved: Vec<f64> = xs
            .iter()
            .map(|x| i0 * comb_intensity(&comb, spec.calibration, p.waist_m, *x))
            .collect();
        write_file(&out.join(format!("intensity1d_{label}.csv")), |w| {
            write_columns(
                &["x_m", "static_W_per_m2", "averaged_W_per_m2", "sideband_W_per_m2"],
                &[&xs, &static_i, &averaged, &resolved],
                w,
            )
        })?;

        let us = grid(p.map_points, reach);
        let vs = grid(p.map_points, 3.0 * p.waist_m);
        let mut cols: [Vec<f64>; 4] = Default::default();
        for &v in &vs {
            let transverse = (-2.0 * v * v / (p.waist_m * p.waist_m)).exp();
            for &u in &us {
                cols[0].push(u);
                cols[1].push(v);
                cols[2].push(painted.intensity(&Vec3::new(0.0, u, v)));
                cols[3].push(i0 * transverse * comb_intensity(&comb, spec.calibration, p.waist_m, u));
            }
        }
        write_file(&out.join(format!("intensity2d_{label}.csv")), |w| {
            write_columns(
                &["x_m", "z_m", "averaged_W_per_m2", "sideband_W_per_m2"],
                &[&cols[0], &cols[1], &cols[2], &cols[3]],
                w,
            )
        })?;

        let (well_spacing, corrugation, warnings) = if f_p == 0.0 {
            (0.0, 0.0, Vec::new())
        } else {
            let frag = sideband_fragmentation(&spec, p.waist_m, Some(&dwell))?;
            let warnings = validate_painting(
                &spec,
                p.trap_frequencies_Hz,
                p.frequency_margin,
                p.waist_m,
                p.corrugation_threshold,
            )?;
            (frag.well_spacing, frag.corrugation, warnings.iter().map(warning_text).collect())
        };
        let regime = if f_p == 0.0 {
            "static"
        } else if corrugation > 0.5 {
            "fragmented"
        } else if corrugation < p.corrugation_threshold {
            "smooth"
        } else {
            "intermediate"
        };
        cases.push(PaintCase {
            label,
            painting_frequency_Hz: f_p,
            well_spacing_m: well_spacing,
            corrugation,
            regime: regime.to_string(),
            warnings,
        });
    }

    write_file(&out.join("corrugation.csv"), |w| {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        wr.write_record(["label", "f_p_Hz", "well_spacing_m", "corrugation", "regime", "warnings"])?;
        for c in &cases {
            wr.write_record([
                c.label.clone(),
                format!("{:e}", c.painting_frequency_Hz),
                format!("{:e}", c.well_spacing_m),
                format!("{:e}", c.corrugation),
                c.regime.clone(),
                c.warnings.join("; "),
            ])?;
        }
        wr.flush()?;
        Ok(())
    })?;
    Ok(PaintReport { cases })
}

/// Characterisation at one instant of the schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub t_s: f64,
    pub P1_W: f64,
    pub P2_W: f64,
    pub xs1_m: f64,
    pub xs2_m: f64,
    pub Bp_Tpm: f64,
    pub trapped: bool,
    /// Why the trap could not be characterised.
    pub failure: Option<String>,
    pub minimum_m: [f64; 3],
    pub frequencies_Hz: [f64; 3],
    /// Depths of `[m_F=-1, 0, +1]`.
    pub depth_uK: [f64; 3],
    /// Magnetic acceleration on `m_F = ±1`.
    pub magnetic_acceleration_m_per_s2: f64,
}

/// Characterises the trap at `t`. An untrapped configuration is reported
/// with zero depth; it is an error only when `strict`.
pub fn trap(cfg: &RunConfig, t: f64, out: &Path, strict: bool) -> Result<TrapReport> {
    let setup = cfg.setup()?;
    let schedule = cfg.schedule.to_core()?;
    let controls = schedule.controls_at(t)?;
    let trap_cfg = setup.trap_at(&controls)?;
    let kb = setup.constants.boltzmann;
    let mut report = TrapReport {
        t_s: t,
        P1_W: controls.power[0],
        P2_W: controls.power[1],
        xs1_m: controls.stroke[0],
        xs2_m: controls.stroke[1],
        Bp_Tpm: controls.gradient,
        trapped: true,
        failure: None,
        minimum_m: [0.0; 3],
        frequencies_Hz: [0.0; 3],
        depth_uK: [0.0; 3],
        magnetic_acceleration_m_per_s2: trap_cfg.magnetic_acceleration(SpinState::Plus),
    };
    let failure = match characterize(&trap_cfg, trap_cfg.crossing_point(), cfg.search()) {
        Ok(c) => {
            report.minimum_m = c.minimum.into();
            report.frequencies_Hz = c.frequencies;
            report.depth_uK = c.depth.map(|d| d / kb * 1e6);
            report.trapped = c.depth[1] > 0.0;
            None
        }
        Err(e @ paintrap_core::Error::InvalidParameter { .. }) => return Err(e.into()),
        Err(e) => {
            report.trapped = false;
            report.failure = Some(e.to_string());
            Some(e)
        }
    };
    ensure_dir(out)?;
    write_json(&out.join("trap.json"), &report)?;
    if strict && !report.trapped {
        return Err(Error::Core(failure.unwrap_or(paintrap_core::Error::Untrapped {
            x: report.minimum_m[0],
            y: report.minimum_m[1],
            z: report.minimum_m[2],
        })));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvapSummary {
    pub initial_atoms: [f64; 3],
    pub initial_temperature_K: f64,
    /// Atoms in `[m_F=-1, 0, +1]` at the end.
    pub final_atoms: [f64; 3],
    pub final_temperature_K: f64,
    pub psd: f64,
    pub condensate_fraction: f64,
    pub condensed_atoms: f64,
    pub schedule_duration_s: f64,
    pub cycle_time_s: f64,
    pub points: usize,
}

/// Runs the configured schedule, writing `trajectory.csv` and
/// `summary.json`.
pub fn evap(cfg: &RunConfig, out: &Path) -> Result<EvapSummary> {
    let setup = cfg.setup()?;
    let schedule = cfg.schedule.to_core()?;
    let options = cfg.run_options()?;
    let overheads = cfg.overheads.to_core()?;
    let initial = cfg.initial_state()?;
    let trajectory = run_schedule(&setup, &schedule, &initial, &options)?;
    let last = trajectory.last().expect("trajectory has a point");
    let summary = EvapSummary {
        initial_atoms: initial.atoms,
        initial_temperature_K: initial.temperature,
        final_atoms: last.state.atoms,
        final_temperature_K: last.state.temperature,
        psd: last.psd,
        condensate_fraction: last.condensate_fraction,
        condensed_atoms: last.condensed_atoms(),
        schedule_duration_s: schedule.duration(),
        cycle_time_s: cycle_time(&schedule, &overheads),
        points: trajectory.points.len(),
    };
    ensure_dir(out)?;
    write_file(&out.join("trajectory.csv"), |w| {
        write_trajectory_csv(&trajectory, &setup.constants, w)
    })?;
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Analytic test problems for the optimiser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// Maximise `-Σ x_i²` over `[-5, 5]^10`.
    Sphere,
    /// Maximise minus the 2-D Rosenbrock function over `[-5, 5]²`.
    Rosenbrock,
}

impl std::str::FromStr for Benchmark {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Benchmark::Sphere),
            "rosenbrock" => Ok(Benchmark::Rosenbrock),
            other => Err(Error::config(format!("unknown benchmark {other:?}"))),
        }
    }
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Sphere => "sphere",
            Benchmark::Rosenbrock => "rosenbrock",
        }
    }

    pub fn space(self) -> ParameterSpace {
        match self {
            Benchmark::Sphere => ParameterSpace::uniform(10, -5.0, 5.0),
            Benchmark::Rosenbrock => ParameterSpace::uniform(2, -5.0, 5.0),
        }
    }

    pub fn objective(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Sphere => -x.iter().map(|v| v * v).sum::<f64>(),
            Benchmark::Rosenbrock => -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stages {
    Benchmark(Benchmark),
    Loading,
    Evaporation,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub best_value: f64,
    pub dimension: usize,
    pub evaluations: usize,
    pub files: Vec<PathBuf>,
}

/// Stage-2 problem from the configured initial cloud and schedule.
pub fn evaporation_problem(cfg: &RunConfig) -> Result<EvaporationProblem> {
    let schedule = cfg.schedule.to_core()?;
    Ok(EvaporationProblem {
        setup: cfg.setup()?,
        space: EvaporationSpace::new(&schedule, ControlLimits::from_controls(&schedule.initial))?,
        initial: cfg.initial_state()?,
        options: cfg.run_options()?,
    })
}

pub fn two_stage_problem(cfg: &RunConfig) -> Result<TwoStageProblem> {
    let schedule = cfg.schedule.to_core()?;
    let options = cfg.run_options()?;
    Ok(TwoStageProblem {
        setup: cfg.setup()?,
        stage1: LoadingSpace::new(schedule.initial.power, schedule.initial.stroke),
        schedule,
        surrogate: MolassesSurrogate::default(),
        loading: cfg.loading.to_core(),
        loading_hold: cfg.loading.hold_s,
        options,
        loading_options: options,
    })
}

/// Config after freezing the stage-1 choice `s`: laser settings, shifted
/// foci and the loading powers and strokes.
fn with_loading(cfg: &RunConfig, problem: &TwoStageProblem, s: &LoadingSettings) -> Result<RunConfig> {
    let mut best = cfg.clone();
    let setup = problem.setup_for(s);
    best.beams = [BeamConfig::from(&setup.beams[0]), BeamConfig::from(&setup.beams[1])];
    best.molasses = None;
    best.laser_cooling = Some(LaserCoolingConfig::from(&s.molasses));
    let mut schedule = cfg.schedule.to_core()?;
    schedule.initial.power = s.power;
    schedule.initial.stroke = s.stroke;
    if let Some(first) = schedule.segments.first_mut() {
        first.start.power = s.power;
        first.start.stroke = s.stroke;
    }
    best.schedule = ScheduleConfig::from(&schedule);
    Ok(best)
}

fn check_dimension(space: &ParameterSpace, expected: Option<usize>) -> Result<()> {
    match expected {
        Some(n) if n != space.len() => Err(Error::config(format!(
            "--params {n} does not match the {}-parameter space",
            space.len()
        ))),
        _ => Ok(()),
    }
}

fn save_record(out: &Path, name: &str, result: &DeResult, space: &ParameterSpace, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    write_file(&path, |w| write_run_record_csv(&result.record, space, w))?;
    files.push(path);
    Ok(())
}

/// Runs the requested optimisation and writes the run records and the best
/// parameters.
pub fn optimize(
    cfg: &RunConfig,
    out: &Path,
    stages: Stages,
    expected_params: Option<usize>,
    evaluator: &dyn Evaluator,
) -> Result<OptimizeReport> {
    let opt = &cfg.optimizer;
    let de2: DeConfig = opt.de(opt.generations)?;
    ensure_dir(out)?;
    let mut files = Vec::new();
    let (best_value, dimension, evaluations) = match stages {
        Stages::Benchmark(b) => {
            let space = b.space();
            check_dimension(&space, expected_params)?;
            let result = de_optimize_with(&|x| b.objective(x), &space, &de2, evaluator)?;
            save_record(out, &format!("run_record_{}.csv", b.name()), &result, &space, &mut files)?;
            let best: serde_json::Map<String, serde_json::Value> = space
                .parameters
                .iter()
                .zip(&result.best)
                .map(|(p, v)| (p.name.clone(), serde_json::Value::from(*v)))
                .collect();
            let path = out.join("best_params.json");
            write_json(&path, &best)?;
            files.push(path);
            (result.best_value, space.len(), result.record.evaluations.len())
        }
        Stages::Evaporation => {
            let problem = evaporation_problem(cfg)?;
            let space = &problem.space.space;
            check_dimension(space, expected_params)?;
            let result = de_optimize_with(&|x| objective_final_atoms(&problem, x), space, &de2, evaluator)?;
            save_record(out, "run_record_stage2.csv", &result, space, &mut files)?;
            let mut best = cfg.clone();
            best.schedule = ScheduleConfig::from(&problem.space.decode(&result.best)?);
            let path = out.join("best_config.json");
            best.save(&path)?;
            files.push(path);
            (result.best_value, space.len(), result.record.evaluations.len())
        }
        Stages::Loading => {
            let problem = two_stage_problem(cfg)?;
            let space = &problem.stage1.space;
            check_dimension(space, expected_params)?;
            let de1 = opt.de(opt.stage1_generations)?;
            let result = de_optimize_with(&|x| problem.loading_objective(x), space, &de1, evaluator)?;
            save_record(out, "run_record_stage1.csv", &result, space, &mut files)?;
            let best = with_loading(cfg, &problem, &problem.stage1.decode(&result.best)?)?;
            let path = out.join("best_config.json");
            best.save(&path)?;
            files.push(path);
            (result.best_value, space.len(), result.record.evaluations.len())
        }
        Stages::Both => {
            let problem = two_stage_problem(cfg)?;
            let stage2_len = evaporation_problem(cfg)?.space.space.len();
            if let Some(n) = expected_params {
                let total = problem.stage1.space.len() + stage2_len;
                if n != total {
                    return Err(Error::config(format!(
                        "--params {n} does not match the {total} parameters of both stages"
                    )));
                }
            }
            let de1 = opt.de(opt.stage1_generations)?;
            let result = two_stage_optimize(&problem, &de1, &de2, evaluator)?;
            save_record(out, "run_record_stage1.csv", &result.stage1, &problem.stage1.space, &mut files)?;
            let space2 = &result.problem.space.space;
            save_record(out, "run_record_stage2.csv", &result.stage2, space2, &mut files)?;
            let mut best = with_loading(cfg, &problem, &result.loading)?;
            best.schedule = ScheduleConfig::from(&result.problem.space.decode(&result.stage2.best)?);
            let path = out.join("best_config.json");
            best.save(&path)?;
            files.push(path);
            let evals = result.stage1.record.evaluations.len() + result.stage2.record.evaluations.len();
            (result.stage2.best_value, problem.stage1.space.len() + space2.len(), evals)
        }
    };
    Ok(OptimizeReport {
        best_value,
        dimension,
        evaluations,
        files,
    })
}

/// Evaluator for the configured thread count.
pub fn evaluator(cfg: &RunConfig) -> Result<Parallel> {
    Parallel::new(cfg.optimizer.threads)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformFormat {
    Csv,
    Iq,
}

impl std::str::FromStr for WaveformFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(WaveformFormat::Csv),
            "iq" => Ok(WaveformFormat::Iq),
            other => Err(Error::config(format!("unsupported waveform format {other:?}"))),
        }
    }
}

/// Writes the drive waveform at the export painting frequency.
pub fn export_waveform(cfg: &RunConfig, out: &Path, format: WaveformFormat) -> Result<PathBuf> {
    let p = &cfg.painting;
    p.validate()?;
    let spec = p.spec(p.export_frequency_Hz)?;
    let dwell = p.dwell_for(p.export_frequency_Hz)?;
    let n = p.samples_for(&spec);
    let waveform = frequency_trajectory(&dwell, &spec, n as f64 * spec.painting_frequency)?;
    ensure_dir(out)?;
    match format {
        WaveformFormat::Csv => {
            let path = out.join("waveform.csv");
            write_file(&path, |w| write_waveform_csv(&waveform, p.export_periods, w))?;
            Ok(path)
        }
        WaveformFormat::Iq => {
            let path = out.join("waveform.iq");
            write_bytes(&path, &iq_bytes(&waveform, p.export_periods))?;
            Ok(path)
        }
    }
}
