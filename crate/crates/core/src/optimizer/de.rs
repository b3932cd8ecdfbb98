use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ParameterSpace;
use crate::{Error, Result};

/// DE/rand/1/bin settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeConfig {
    /// Population size NP.
    pub population: usize,
    /// Differential weight F.
    pub weight: f64,
    /// Crossover rate CR.
    pub crossover: f64,
    /// Generations after the initial population.
    pub generations: usize,
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population: 32,
            weight: 0.7,
            crossover: 0.9,
            generations: 100,
            seed: 0,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::invalid("population", "must be >= 4"));
        }
        if !(self.weight > 0.0 && self.weight <= 2.0) {
            return Err(Error::invalid("weight", "must be in (0, 2]"));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::invalid("crossover", "must be in [0, 1]"));
        }
        Ok(())
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub generation: usize,
    pub member: usize,
    pub params: Vec<f64>,
    /// `-inf` marks a failed evaluation.
    pub objective: f64,
    /// Wall-clock seconds, when the evaluator measures it.
    pub wall_time: Option<f64>,
}

/// Every evaluation of a run plus the population best after each
/// generation (index 0 is the initial population).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRecord {
    pub evaluations: Vec<Evaluation>,
    pub best_so_far: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub record: RunRecord,
}

/// Scores a batch of candidate vectors. Implementations may evaluate in any
/// order or in parallel; results must be returned in input order.
pub trait Evaluator {
    fn evaluate(&self, objective: &(dyn Fn(&[f64]) -> f64 + Sync), candidates: &[Vec<f64>]) -> Vec<Scored>;
}

/// Objective value and optional wall time of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub objective: f64,
    pub wall_time: Option<f64>,
}

/// In-order evaluation on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Evaluator for Sequential {
    fn evaluate(&self, objective: &(dyn Fn(&[f64]) -> f64 + Sync), candidates: &[Vec<f64>]) -> Vec<Scored> {
        candidates
            .iter()
            .map(|c| Scored {
                objective: objective(c),
                wall_time: None,
            })
            .collect()
    }
}

/// Random stream for one (generation, member) pair.
fn member_rng(seed: u64, generation: usize, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | member as u64);
    rng
}

/// Folds `v` back into `[lo, hi]` by mirror reflection at the bounds.
pub fn reflect(v: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&v) {
        return v;
    }
    let width = hi - lo;
    let period = 2.0 * width;
    let mut t = libm::fmod(v - lo, period);
    if t < 0.0 {
        t += period;
    }
    if t > width {
        t = period - t;
    }
    (lo + t).clamp(lo, hi)
}

fn sanitize(value: f64) -> f64 {
    if value.is_nan() {
        f64::NEG_INFINITY
    } else {
        value
    }
}

/// Maximises `objective` over `space` with DE/rand/1/bin, evaluating on the
/// calling thread.
pub fn de_optimize(
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    space: &ParameterSpace,
    config: &DeConfig,
) -> Result<DeResult> {
    de_optimize_with(objective, space, config, &Sequential)
}

/// [`de_optimize`] with a caller-supplied evaluator. NaN objective values
/// count as failures (`-inf`). The outcome depends only on the seed, never
/// on evaluation order.
pub fn de_optimize_with(
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    space: &ParameterSpace,
    config: &DeConfig,
    evaluator: &dyn Evaluator,
) -> Result<DeResult> {
    config.validate()?;
    space.validate()?;
    let np = config.population;
    let dim = space.len();
    let bounds: Vec<(f64, f64)> = space.parameters.iter().map(|p| (p.lower, p.upper)).collect();

    let mut population: Vec<Vec<f64>> = (0..np)
        .map(|i| {
            let mut rng = member_rng(config.seed, 0, i);
            bounds.iter().map(|(lo, hi)| rng.gen_range(*lo..=*hi)).collect()
        })
        .collect();
    let mut record = RunRecord::default();
    let mut fitness: Vec<f64> = evaluator
        .evaluate(objective, &population)
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let value = sanitize(s.objective);
            record.evaluations.push(Evaluation {
                generation: 0,
                member: i,
                params: population[i].clone(),
                objective: value,
                wall_time: s.wall_time,
            });
            value
        })
        .collect();
    record.best_so_far.push(fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max));

    for generation in 1..=config.generations {
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut rng = member_rng(config.seed, generation, i);
                let mut pick = |exclude: &[usize]| loop {
                    let k = rng.gen_range(0..np);
                    if !exclude.contains(&k) {
                        break k;
                    }
                };
                let a = pick(&[i]);
                let b = pick(&[i, a]);
                let c = pick(&[i, a, b]);
                let forced = rng.gen_range(0..dim);
                (0..dim)
                    .map(|d| {
                        let cross: f64 = rng.gen();
                        if d == forced || cross < config.crossover {
                            let v = population[a][d] + config.weight * (population[b][d] - population[c][d]);
                            reflect(v, bounds[d].0, bounds[d].1)
                        } else {
                            population[i][d]
                        }
                    })
                    .collect()
            })
            .collect();
        let scores = evaluator.evaluate(objective, &trials);
        for (i, (trial, score)) in trials.into_iter().zip(scores).enumerate() {
            let value = sanitize(score.objective);
            record.evaluations.push(Evaluation {
                generation,
                member: i,
                params: trial.clone(),
                objective: value,
                wall_time: score.wall_time,
            });
            if value >= fitness[i] {
                population[i] = trial;
                fitness[i] = value;
            }
        }
        record.best_so_far.push(fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    // first index wins ties
    let (best_index, best_value) = fitness
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(DeResult {
        best: population[best_index].clone(),
        best_value,
        record,
    })
}
