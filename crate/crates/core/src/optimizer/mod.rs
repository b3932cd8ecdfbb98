//! Differential evolution and the schedule optimisation problems built on
//! the simulator.

mod de;
mod problem;
mod space;

pub use de::{
    de_optimize, de_optimize_with, reflect, DeConfig, DeResult, Evaluation, Evaluator, RunRecord, Scored,
    Sequential,
};
pub use problem::{
    objective_final_atoms, two_stage_optimize, EvaporationProblem, LoadingSettings, LoadingSpace, MolassesSettings,
    MolassesSurrogate, TwoStageProblem, TwoStageResult,
};
pub use space::{ControlLimits, EvaporationSpace, Parameter, ParameterSpace};
