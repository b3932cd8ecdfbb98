use alloc::vec::Vec;

use crate::{Error, Result};

/// Experiment controls at one instant: beam powers (W), stroke amplitudes
/// (m), and the vertical magnetic gradient (T/m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Controls {
    pub power: [f64; 2],
    pub stroke: [f64; 2],
    pub gradient: f64,
}

impl Controls {
    pub fn lerp(&self, other: &Controls, frac: f64) -> Controls {
        // exact at both ends and for constant controls
        let mix = |a: f64, b: f64| if frac >= 1.0 { b } else { a + (b - a) * frac };
        Controls {
            power: [mix(self.power[0], other.power[0]), mix(self.power[1], other.power[1])],
            stroke: [mix(self.stroke[0], other.stroke[0]), mix(self.stroke[1], other.stroke[1])],
            gradient: mix(self.gradient, other.gradient),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !self.power.iter().all(|p| ok(*p)) {
            return Err(Error::invalid("power", "must be finite and >= 0"));
        }
        if !self.stroke.iter().all(|s| ok(*s)) {
            return Err(Error::invalid("stroke", "must be finite and >= 0"));
        }
        if !ok(self.gradient) {
            return Err(Error::invalid("gradient", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// One linear ramp of all controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSegment {
    pub duration: f64,
    pub start: Controls,
    pub end: Controls,
    /// Allows `start` to differ from the previous segment's `end`.
    pub jump: bool,
}

/// Evaporation ramps, followed by a hold at the final controls and a linear
/// power ramp-up (strokes and gradient held).
#[derive(Debug, Clone, PartialEq)]
pub struct RampSchedule {
    /// Controls at t = 0; used as-is when there are no segments.
    pub initial: Controls,
    pub segments: Vec<RampSegment>,
    pub hold: f64,
    pub ramp_up: f64,
    pub ramp_up_power: [f64; 2],
}

impl RampSchedule {
    /// Continuous schedule through `waypoints` of `(duration, end controls)`.
    pub fn from_waypoints(initial: Controls, waypoints: &[(f64, Controls)]) -> Self {
        let mut start = initial;
        let segments = waypoints
            .iter()
            .map(|(duration, end)| {
                let seg = RampSegment {
                    duration: *duration,
                    start,
                    end: *end,
                    jump: false,
                };
                start = *end;
                seg
            })
            .collect();
        Self {
            initial,
            segments,
            hold: 0.0,
            ramp_up: 0.0,
            ramp_up_power: [0.0; 2],
        }
    }

    pub fn with_hold(mut self, hold: f64, ramp_up: f64, ramp_up_power: [f64; 2]) -> Self {
        self.hold = hold;
        self.ramp_up = ramp_up;
        self.ramp_up_power = ramp_up_power;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        let mut previous = self.initial;
        for seg in &self.segments {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                return Err(Error::invalid("segment duration", "must be > 0"));
            }
            seg.start.validate()?;
            seg.end.validate()?;
            if !seg.jump && !controls_close(&seg.start, &previous) {
                return Err(Error::invalid(
                    "ramp schedule",
                    "segment start differs from the previous end without a jump flag",
                ));
            }
            previous = seg.end;
        }
        if !(self.hold >= 0.0 && self.ramp_up >= 0.0) {
            return Err(Error::invalid("hold/ramp_up", "must be >= 0"));
        }
        if !self.ramp_up_power.iter().all(|p| *p >= 0.0 && p.is_finite()) {
            return Err(Error::invalid("ramp_up_power", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn evaporation_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn duration(&self) -> f64 {
        self.evaporation_duration() + self.hold + self.ramp_up
    }

    /// Controls at the end of the evaporation ramps.
    pub fn final_controls(&self) -> Controls {
        self.segments.last().map_or(self.initial, |s| s.end)
    }

    /// Shortest phase: a segment, the hold, or the ramp-up (ignoring empty
    /// ones). `None` for a zero-length schedule.
    pub fn shortest_phase(&self) -> Option<f64> {
        self.segments
            .iter()
            .map(|s| s.duration)
            .chain([self.hold, self.ramp_up])
            .filter(|d| *d > 0.0)
            .reduce(f64::min)
    }

    /// Piecewise-linear controls at time `t`.
    pub fn controls_at(&self, t: f64) -> Result<Controls> {
        let total = self.duration();
        if !(t >= 0.0 && t <= total * (1.0 + 1e-12) + 1e-15) {
            return Err(Error::TimeOutOfRange {
                time: t,
                duration: total,
            });
        }
        let mut start = 0.0;
        for seg in &self.segments {
            if t <= start + seg.duration {
                let frac = ((t - start) / seg.duration).clamp(0.0, 1.0);
                return Ok(seg.start.lerp(&seg.end, frac));
            }
            start += seg.duration;
        }
        let last = self.final_controls();
        if t <= start + self.hold || self.ramp_up == 0.0 {
            return Ok(last);
        }
        let frac = if t >= total {
            1.0
        } else {
            ((t - start - self.hold) / self.ramp_up).clamp(0.0, 1.0)
        };
        let target = Controls {
            power: self.ramp_up_power,
            ..last
        };
        Ok(last.lerp(&target, frac))
    }
}

fn controls_close(a: &Controls, b: &Controls) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-30);
    (0..2).all(|i| close(a.power[i], b.power[i]) && close(a.stroke[i], b.stroke[i]))
        && close(a.gradient, b.gradient)
}

/// Controls of `schedule` at `t`.
pub fn interpolate_controls(schedule: &RampSchedule, t: f64) -> Result<Controls> {
    schedule.controls_at(t)
}

/// Fixed durations around the evaporation in one experimental cycle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleOverheads {
    pub mot_loading: f64,
    pub molasses: f64,
    pub detection: f64,
    /// Anything else (e.g. data readout), added as-is.
    pub other: f64,
}

/// Total cycle time: MOT loading + molasses + evaporation + hold + ramp-up
/// + detection (+ other).
pub fn cycle_time(schedule: &RampSchedule, overheads: &CycleOverheads) -> f64 {
    overheads.mot_loading
        + overheads.molasses
        + schedule.evaporation_duration()
        + schedule.hold
        + schedule.ramp_up
        + overheads.detection
        + overheads.other
}
