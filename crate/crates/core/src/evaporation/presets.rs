//! Reference geometry and schedules. The interior ramp waypoints are a
//! plausible smooth path between the fixed start and end points, not measured
//! values.

use alloc::vec::Vec;

use super::{Controls, CycleOverheads, LoadingOptions, Molasses, RampSchedule, TrapSetup};
use crate::optics::Beam;
use crate::painting::DwellShape;
use crate::{PhysicalConstants, Vec3};

pub const WAVELENGTH: f64 = 1064e-9;

/// Beam 1: 35 µm waist along x, painted along y. Beam 2: 5 µm waist along
/// y, painted along x. Both focused at the origin, gravity along -z.
pub fn crossed_beams() -> [Beam; 2] {
    [
        Beam {
            power: 0.0,
            waist_x: 35e-6,
            waist_y: 35e-6,
            wavelength: WAVELENGTH,
            axis: Vec3::x(),
            focus: Vec3::zeros(),
            paint_axis: Vec3::y(),
        },
        Beam {
            power: 0.0,
            waist_x: 5e-6,
            waist_y: 5e-6,
            wavelength: WAVELENGTH,
            axis: Vec3::y(),
            focus: Vec3::zeros(),
            paint_axis: Vec3::x(),
        },
    ]
}

pub fn crossed_setup() -> TrapSetup {
    TrapSetup {
        beams: crossed_beams(),
        dwell_shape: DwellShape::Parabolic,
        dwell_cells: 64,
        gravity: true,
        constants: PhysicalConstants::rubidium_87(),
    }
}

fn waypoint(p1: f64, xs1: f64, p2: f64, xs2: f64, bp: f64) -> Controls {
    Controls {
        power: [p1, p2],
        stroke: [xs1, xs2],
        gradient: bp,
    }
}

/// Loading configuration: 20 W painted over 1.1 mm, 0.5 W over 210 µm and
/// 67 G/cm.
pub fn initial_controls() -> Controls {
    waypoint(20.0, 1.1e-3, 0.5, 210e-6, 0.67)
}

/// End of evaporation: beam 1 unpainted, beam 2 at 5 mW over 15.8 µm.
pub fn final_controls() -> Controls {
    waypoint(0.1, 0.0, 5e-3, 15.8e-6, 0.67)
}

fn interior_waypoints() -> Vec<Controls> {
    alloc::vec![
        waypoint(10.0, 0.5e-3, 0.5, 150e-6, 0.67),
        waypoint(4.0, 0.0, 0.4, 100e-6, 0.67),
        waypoint(1.5, 0.0, 0.2, 60e-6, 0.67),
        waypoint(0.6, 0.0, 0.08, 35e-6, 0.67),
        waypoint(0.25, 0.0, 0.025, 22e-6, 0.67),
    ]
}

/// Six ramps between the loading and final configurations.
pub fn waypoints() -> Vec<Controls> {
    let mut w = interior_waypoints();
    w.push(final_controls());
    w
}

/// Final powers after the ramp-up that stabilises the condensate.
pub const RAMP_UP_POWER: [f64; 2] = [0.1, 10e-3];

/// Six 40 ms ramps, 20 ms hold and 30 ms power ramp-up.
pub fn reference_schedule() -> RampSchedule {
    let steps: Vec<(f64, Controls)> = waypoints().into_iter().map(|c| (0.040, c)).collect();
    RampSchedule::from_waypoints(initial_controls(), &steps).with_hold(0.020, 0.030, RAMP_UP_POWER)
}

/// The short production sequence: 275 ms of evaporation through the same
/// waypoints, then the hold and ramp-up.
pub fn fast_schedule() -> RampSchedule {
    let durations = [0.045, 0.045, 0.045, 0.045, 0.045, 0.050];
    let steps: Vec<(f64, Controls)> = durations.iter().copied().zip(waypoints()).collect();
    RampSchedule::from_waypoints(initial_controls(), &steps).with_hold(0.020, 0.030, RAMP_UP_POWER)
}

/// 120 ms MOT, 31 ms molasses, 10 ms detection.
pub fn fast_overheads() -> CycleOverheads {
    CycleOverheads {
        mot_loading: 0.120,
        molasses: 0.031,
        detection: 0.010,
        other: 0.0,
    }
}

/// The sequence used while optimising: 2020 ms MOT loading and 1010 ms for
/// the optimiser to read the last run; 11 ms of unattributed dead time makes
/// up the 3372 ms cycle with the reference schedule.
pub fn optimization_overheads() -> CycleOverheads {
    CycleOverheads {
        mot_loading: 2.020,
        molasses: 0.031,
        detection: 0.010,
        other: 1.010 + 0.011,
    }
}

/// 4e9 atoms at 18 µK, 1/e radius 1 mm.
pub fn molasses() -> Molasses {
    Molasses {
        atoms: 4e9,
        temperature: 18e-6,
        radius: 1e-3,
    }
}

/// Calibrated transfer: a tenth of the geometric capture, about 7.7e6 atoms
/// with the loading controls.
pub const TRANSFER_EFFICIENCY: f64 = 0.1;

pub fn loading_options() -> LoadingOptions {
    LoadingOptions {
        transfer_efficiency: TRANSFER_EFFICIENCY,
        ..Default::default()
    }
}
