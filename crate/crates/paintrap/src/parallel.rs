//! Parallel population evaluation.

use std::time::Instant;

use paintrap_core::optimizer::{Evaluator, Scored};
use rayon::prelude::*;

use crate::{Error, Result};

/// Scores candidates on a rayon pool. Results come back in input order, so
/// the optimiser's trajectory does not depend on the thread count.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `None` uses one thread per core.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(Error::config("threads must be >= 1"));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::config(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Evaluator for Parallel {
    fn evaluate(&self, objective: &(dyn Fn(&[f64]) -> f64 + Sync), candidates: &[Vec<f64>]) -> Vec<Scored> {
        self.pool.install(|| {
            candidates
                .par_iter()
                .map(|c| {
                    let start = Instant::now();
                    let objective = objective(c);
                    Scored {
                        objective,
                        wall_time: Some(start.elapsed().as_secs_f64()),
                    }
                })
                .collect()
        })
    }
}
