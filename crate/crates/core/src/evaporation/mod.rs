//! Time evolution of the trapped cloud through a ramp schedule.

mod cloud;
mod dynamics;
mod loading;
pub mod presets;
mod run;
mod schedule;

pub use cloud::{bec_stats, psd, BecStats, CloudState};
pub use dynamics::{collision_rate, evaporation_step, evolve, peak_density, EvaporationModel, TrapSnapshot};
pub use loading::{load_from_molasses, LoadingOptions, Molasses};
pub use run::{run_schedule, RunOptions, TrapSetup, Trajectory, TrajectoryPoint};
pub use schedule::{cycle_time, interpolate_controls, Controls, CycleOverheads, RampSchedule, RampSegment};

#[cfg(test)]
mod tests;
