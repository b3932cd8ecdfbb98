use alloc::vec::Vec;

use super::{
    bec_stats, collision_rate, evolve, psd, CloudState, Controls, EvaporationModel,
    RampSchedule, TrapSnapshot,
};
use crate::optics::Beam;
use crate::painting::{DwellShape, PaintedBeam};
use crate::trap::{characterize, MinimumSearch, TrapCharacterization, TrapConfig};
use crate::{Error, PhysicalConstants, Result};

/// Fixed trap hardware; [`Controls`] supply powers, strokes and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapSetup {
    /// Beam geometry. The `power` fields are overridden by the controls.
    pub beams: [Beam; 2],
    pub dwell_shape: DwellShape,
    /// Cells of the dwell density of a painted beam.
    pub dwell_cells: usize,
    pub gravity: bool,
    pub constants: PhysicalConstants,
}

impl TrapSetup {
    pub fn validate(&self) -> Result<()> {
        for b in &self.beams {
            b.validate()?;
        }
        if self.dwell_cells == 0 {
            return Err(Error::invalid("dwell_cells", "must be >= 1"));
        }
        self.constants.validate()
    }

    pub fn trap_at(&self, controls: &Controls) -> Result<TrapConfig> {
        controls.validate()?;
        let painted = |i: usize| -> Result<PaintedBeam> {
            let beam = Beam {
                power: controls.power[i],
                ..self.beams[i]
            };
            let dwell = self.dwell_shape.density(controls.stroke[i], self.dwell_cells)?;
            Ok(PaintedBeam::new(beam, dwell))
        };
        let cfg = TrapConfig {
            beams: [painted(0)?, painted(1)?],
            gradient: controls.gradient,
            gravity: self.gravity,
            constants: self.constants,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Integration settings of [`run_schedule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Integrator step in s.
    pub dt: f64,
    /// Interval between full trap characterisations in s.
    pub recharacterize_every: f64,
    pub model: EvaporationModel,
    pub search: MinimumSearch,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            dt: 2e-5,
            recharacterize_every: 2e-3,
            model: EvaporationModel::default(),
            search: MinimumSearch::default(),
        }
    }
}

/// One recorded instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub controls: Controls,
    pub trap: TrapCharacterization,
    pub state: CloudState,
    /// Truncation parameter per spin, depth / k_B T.
    pub eta: [f64; 3],
    /// Elastic collision rate in 1/s.
    pub collision_rate: f64,
    pub psd: f64,
    pub condensate_fraction: f64,
}

impl TrajectoryPoint {
    pub fn condensed_atoms(&self) -> f64 {
        self.condensate_fraction * self.state.total()
    }
}

/// Recorded evolution at the recharacterisation instants, strictly
/// increasing in time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }
}

fn record(
    time: f64,
    controls: Controls,
    trap: TrapCharacterization,
    state: CloudState,
    options: &RunOptions,
    constants: &PhysicalConstants,
) -> TrajectoryPoint {
    let w = trap.mean_angular_frequency();
    let kt = constants.boltzmann * state.temperature;
    let stats = if state.total() > 0.0 {
        bec_stats(&state, w, constants).condensate_fraction
    } else {
        0.0
    };
    TrajectoryPoint {
        time,
        controls,
        trap,
        state,
        eta: [trap.depth[0] / kt, trap.depth[1] / kt, trap.depth[2] / kt],
        collision_rate: collision_rate(state.total(), state.temperature, w, &options.model, constants),
        psd: psd(&state, w, constants),
        condensate_fraction: stats,
    }
}

/// Runs `initial` through `schedule`: the trap is characterised every
/// `recharacterize_every` (and at the end), and the cloud is integrated in
/// between with the mean frequency and depths linearly interpolated.
pub fn run_schedule(
    setup: &TrapSetup,
    schedule: &RampSchedule,
    initial: &CloudState,
    options: &RunOptions,
) -> Result<Trajectory> {
    setup.validate()?;
    schedule.validate()?;
    initial.validate()?;
    options.model.validate()?;
    let total = schedule.duration();
    let delta = options.recharacterize_every;
    if !(options.dt > 0.0 && options.dt <= delta) {
        return Err(Error::invalid("dt", "must satisfy 0 < dt <= recharacterize_every"));
    }
    if let Some(shortest) = schedule.shortest_phase() {
        if delta > shortest / 4.0 * (1.0 + 1e-9) {
            return Err(Error::invalid(
                "recharacterize_every",
                "must not exceed a quarter of the shortest schedule phase",
            ));
        }
    }

    let mut instants: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * delta;
        if t >= total - 1e-9 * delta {
            break;
        }
        instants.push(t);
        k += 1;
    }
    instants.push(total);

    let constants = &setup.constants;
    let characterize_at = |t: f64, seed: Option<crate::Vec3>| -> Result<(Controls, TrapCharacterization)> {
        let controls = schedule.controls_at(t)?;
        let cfg = setup.trap_at(&controls)?;
        let (seed, search) = match seed {
            Some(s) => (
                s,
                MinimumSearch {
                    initial_step: Some(options.search.initial_step.unwrap_or(0.1 * cfg.smallest_waist())),
                    ..options.search
                },
            ),
            None => (cfg.crossing_point(), options.search),
        };
        let c = characterize(&cfg, seed, search).map_err(|e| e.at_time(t))?;
        Ok((controls, c))
    };

    let mut state = CloudState {
        time: 0.0,
        ..*initial
    };
    let (mut controls, mut trap) = characterize_at(0.0, None)?;
    let mut points = Vec::with_capacity(instants.len());
    points.push(record(0.0, controls, trap, state, options, constants));

    for pair in instants.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let (next_controls, next_trap) = characterize_at(t1, Some(trap.minimum))?;
        let span = t1 - t0;
        let start = TrapSnapshot::from(&trap);
        let rate = start.rate_to(&TrapSnapshot::from(&next_trap), span);
        state = evolve(&state, &start, &rate, span, options.dt, &options.model, constants)
            .map_err(|e| e.at_time(t0))?;
        state.time = t1;
        controls = next_controls;
        trap = next_trap;
        points.push(record(t1, controls, trap, state, options, constants));
    }
    Ok(Trajectory { points })
}
