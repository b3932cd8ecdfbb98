use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The trap has no bounded minimum for the requested spin state.
    #[error("untrapped: no bounded potential minimum near ({x:.3e}, {y:.3e}, {z:.3e}) m")]
    Untrapped { x: f64, y: f64, z: f64 },

    #[error("minimiser did not converge after {iterations} iterations (simplex diameter {diameter:.3e} m)")]
    NotConverged { iterations: usize, diameter: f64 },

    /// A Hessian eigenvalue was negative: the stationary point is a saddle.
    #[error("saddle point: curvature {curvature:.3e} J/m² along a principal axis")]
    SaddlePoint { curvature: f64 },

    #[error("temperature became non-positive ({temperature:.3e} K)")]
    NonPositiveTemperature { temperature: f64 },

    #[error("time {time:.6e} s outside schedule [0, {duration:.6e}] s")]
    TimeOutOfRange { time: f64, duration: f64 },

    /// A failure inside a time-dependent simulation, tagged with when it
    /// happened.
    #[error("at t = {time:.6} s: {source}")]
    AtTime {
        time: f64,
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &str) -> Self {
        Error::InvalidParameter {
            name,
            reason: String::from(reason),
        }
    }

    pub(crate) fn at_time(self, time: f64) -> Self {
        match self {
            Error::AtTime { .. } => self,
            other => Error::AtTime {
                time,
                source: alloc::boxed::Box::new(other),
            },
        }
    }

    /// The underlying error, looking through any time tag.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_untrapped(&self) -> bool {
        matches!(self.root(), Error::Untrapped { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
