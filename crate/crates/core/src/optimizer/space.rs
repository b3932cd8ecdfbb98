use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::evaporation::{Controls, RampSchedule};
use crate::{Error, Result};

/// One optimisation variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub unit: String,
}

impl Parameter {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            unit: unit.into(),
        }
    }
}

/// Ordered box of parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParameterSpace {
    pub parameters: Vec<Parameter>,
}

impl ParameterSpace {
    pub fn new(parameters: Vec<Parameter>) -> Self {
        Self { parameters }
    }

    /// The same `[lower, upper]` box in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self::new(
            (0..dim)
                .map(|i| Parameter::new(format!("x{}", i + 1), lower, upper, ""))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameters.is_empty() {
            return Err(Error::invalid("parameter space", "has no parameters"));
        }
        if self
            .parameters
            .iter()
            .any(|p| !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper))
        {
            return Err(Error::invalid("parameter space", "needs finite bounds with lower < upper"));
        }
        Ok(())
    }

    pub fn contains(&self, params: &[f64]) -> bool {
        params.len() == self.len()
            && self
                .parameters
                .iter()
                .zip(params)
                .all(|(p, v)| (p.lower..=p.upper).contains(v))
    }

    /// Length and bounds check.
    pub fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.len() {
            return Err(Error::invalid("parameter vector", "has the wrong length"));
        }
        if !self.contains(params) {
            return Err(Error::invalid("parameter vector", "is outside the bounds"));
        }
        Ok(())
    }
}

/// Upper limits of the evaporation controls; all lower limits are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlLimits {
    pub power: [f64; 2],
    pub stroke: [f64; 2],
    pub gradient: f64,
}

impl ControlLimits {
    /// The loading configuration bounds every later waypoint.
    pub fn from_controls(c: &Controls) -> Self {
        Self {
            power: c.power,
            stroke: c.stroke,
            gradient: c.gradient,
        }
    }
}

/// The evaporation space: five interior waypoints of all controls plus the
/// initial gradient. The initial powers and strokes, the end configuration
/// and all durations are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaporationSpace {
    pub space: ParameterSpace,
    /// Initial controls; the gradient is overridden by the first parameter.
    pub initial: Controls,
    pub final_controls: Controls,
    /// One duration per ramp (waypoints + 1 ramps).
    pub durations: Vec<f64>,
    pub hold: f64,
    pub ramp_up: f64,
    pub ramp_up_power: [f64; 2],
}

const FIELDS: [(&str, &str); 5] = [("P1", "W"), ("P2", "W"), ("xs1", "m"), ("xs2", "m"), ("Bp", "T/m")];

impl EvaporationSpace {
    /// `durations.len() - 1` interior waypoints. Five waypoints give the
    /// 26-parameter space.
    pub fn new(template: &RampSchedule, limits: ControlLimits) -> Result<Self> {
        template.validate()?;
        if template.segments.len() < 2 || template.segments.iter().any(|s| s.jump) {
            return Err(Error::invalid(
                "evaporation template",
                "needs at least two continuous segments",
            ));
        }
        let waypoints = template.segments.len() - 1;
        let mut parameters = alloc::vec![Parameter::new("Bp_0", 0.0, limits.gradient, "T/m")];
        for k in 1..=waypoints {
            let upper = [
                limits.power[0],
                limits.power[1],
                limits.stroke[0],
                limits.stroke[1],
                limits.gradient,
            ];
            for ((name, unit), hi) in FIELDS.iter().zip(upper) {
                parameters.push(Parameter::new(format!("{name}_{k}"), 0.0, hi, *unit));
            }
        }
        let space = ParameterSpace::new(parameters);
        space.validate()?;
        Ok(Self {
            space,
            initial: template.initial,
            final_controls: template.final_controls(),
            durations: template.segments.iter().map(|s| s.duration).collect(),
            hold: template.hold,
            ramp_up: template.ramp_up,
            ramp_up_power: template.ramp_up_power,
        })
    }

    pub fn waypoints(&self) -> usize {
        self.durations.len() - 1
    }

    pub fn decode(&self, params: &[f64]) -> Result<RampSchedule> {
        self.space.check(params)?;
        let initial = Controls {
            gradient: params[0],
            ..self.initial
        };
        let mut steps: Vec<(f64, Controls)> = params[1..]
            .chunks_exact(5)
            .zip(&self.durations)
            .map(|(c, d)| {
                (
                    *d,
                    Controls {
                        power: [c[0], c[1]],
                        stroke: [c[2], c[3]],
                        gradient: c[4],
                    },
                )
            })
            .collect();
        steps.push((*self.durations.last().unwrap_or(&0.0), self.final_controls));
        Ok(RampSchedule::from_waypoints(initial, &steps).with_hold(self.hold, self.ramp_up, self.ramp_up_power))
    }

    /// Inverse of [`decode`](Self::decode) for schedules of the same shape.
    pub fn encode(&self, schedule: &RampSchedule) -> Result<Vec<f64>> {
        schedule.validate()?;
        let same_shape = schedule.segments.len() == self.durations.len()
            && schedule.segments.iter().zip(&self.durations).all(|(s, d)| s.duration == *d && !s.jump)
            && schedule.final_controls() == self.final_controls
            && schedule.initial.power == self.initial.power
            && schedule.initial.stroke == self.initial.stroke
            && schedule.hold == self.hold
            && schedule.ramp_up == self.ramp_up
            && schedule.ramp_up_power == self.ramp_up_power;
        if !same_shape {
            return Err(Error::invalid("schedule", "does not match the parameter space template"));
        }
        let mut params = alloc::vec![schedule.initial.gradient];
        for seg in &schedule.segments[..self.waypoints()] {
            let c = seg.end;
            params.extend_from_slice(&[c.power[0], c.power[1], c.stroke[0], c.stroke[1], c.gradient]);
        }
        self.space.check(&params)?;
        Ok(params)
    }
}
