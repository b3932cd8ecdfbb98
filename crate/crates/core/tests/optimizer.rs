use paintrap_core::optimizer::{
    de_optimize, de_optimize_with, reflect, DeConfig, Evaluator, ParameterSpace, Scored, Sequential,
};
use proptest::prelude::*;

fn sphere(x: &[f64]) -> f64 {
    -x.iter().map(|v| v * v).sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    -((1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a))
}

#[test]
fn sphere_10d() {
    let space = ParameterSpace::uniform(10, -5.0, 5.0);
    let cfg = DeConfig {
        generations: 300,
        seed: 1,
        ..Default::default()
    };
    let r = de_optimize(&sphere, &space, &cfg).unwrap();
    assert!(r.best_value > -1e-6, "{}", r.best_value);
    assert_eq!(r.record.evaluations.len(), 32 * 301);
}

#[test]
fn rosenbrock_2d() {
    let space = ParameterSpace::uniform(2, -5.0, 5.0);
    let cfg = DeConfig {
        generations: 500,
        seed: 2,
        ..Default::default()
    };
    let r = de_optimize(&rosenbrock, &space, &cfg).unwrap();
    let dist = ((r.best[0] - 1.0).powi(2) + (r.best[1] - 1.0).powi(2)).sqrt();
    assert!(dist < 1e-3, "{:?}", r.best);
}

#[test]
fn same_seed_same_record() {
    let space = ParameterSpace::uniform(4, -2.0, 2.0);
    let cfg = DeConfig {
        generations: 40,
        seed: 99,
        ..Default::default()
    };
    let a = de_optimize(&rosenbrock4, &space, &cfg).unwrap();
    let b = de_optimize(&rosenbrock4, &space, &cfg).unwrap();
    assert_eq!(a, b);
    let c = de_optimize(&rosenbrock4, &space, &DeConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.record, c.record);
}

fn rosenbrock4(x: &[f64]) -> f64 {
    x.windows(2).map(rosenbrock).sum()
}

/// Evaluates back to front, as a stand-in for arbitrary parallel order.
struct Reversed;

impl Evaluator for Reversed {
    fn evaluate(&self, objective: &(dyn Fn(&[f64]) -> f64 + Sync), candidates: &[Vec<f64>]) -> Vec<Scored> {
        let mut out: Vec<Scored> = candidates
            .iter()
            .rev()
            .map(|c| Scored {
                objective: objective(c),
                wall_time: None,
            })
            .collect();
        out.reverse();
        out
    }
}

#[test]
fn evaluation_order_does_not_matter() {
    let space = ParameterSpace::uniform(5, -3.0, 3.0);
    let cfg = DeConfig {
        generations: 30,
        seed: 5,
        ..Default::default()
    };
    let a = de_optimize_with(&sphere, &space, &cfg, &Sequential).unwrap();
    let b = de_optimize_with(&sphere, &space, &cfg, &Reversed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn best_is_monotone_and_bounds_hold() {
    let space = ParameterSpace::uniform(6, -1.0, 3.0);
    // optimum outside the box pushes mutants through the upper bound
    let shifted = |x: &[f64]| -x.iter().map(|v| (v - 10.0).powi(2)).sum::<f64>();
    let cfg = DeConfig {
        generations: 50,
        seed: 3,
        weight: 1.5,
        ..Default::default()
    };
    let r = de_optimize(&shifted, &space, &cfg).unwrap();
    assert!(r.record.best_so_far.windows(2).all(|w| w[1] >= w[0]));
    assert!(r.record.evaluations.iter().all(|e| space.contains(&e.params)));
    assert!(r.record.best_so_far.last() > r.record.best_so_far.first());
}

#[test]
fn affine_rescaling_keeps_the_argmax() {
    let space = ParameterSpace::uniform(3, -5.0, 5.0);
    let cfg = DeConfig {
        generations: 25,
        seed: 11,
        ..Default::default()
    };
    let f = |x: &[f64]| rosenbrock4(x);
    let g = |x: &[f64]| 2.5 * rosenbrock4(x) + 7.0;
    let a = de_optimize(&f, &space, &cfg).unwrap();
    let b = de_optimize(&g, &space, &cfg).unwrap();
    assert_eq!(a.best, b.best);
}

#[test]
fn failures_score_negative_infinity_and_the_run_continues() {
    let space = ParameterSpace::uniform(2, -1.0, 1.0);
    let flaky = |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { sphere(x) };
    let cfg = DeConfig {
        generations: 20,
        seed: 4,
        ..Default::default()
    };
    let r = de_optimize(&flaky, &space, &cfg).unwrap();
    assert!(r.record.evaluations.iter().any(|e| e.objective == f64::NEG_INFINITY));
    assert!(r.best_value.is_finite());
    assert!(r.best[0] <= 0.0);
}

#[test]
fn rejects_bad_settings() {
    let space = ParameterSpace::uniform(2, -1.0, 1.0);
    for cfg in [
        DeConfig { population: 3, ..Default::default() },
        DeConfig { weight: 0.0, ..Default::default() },
        DeConfig { weight: 2.5, ..Default::default() },
        DeConfig { crossover: 1.5, ..Default::default() },
    ] {
        assert!(de_optimize(&sphere, &space, &cfg).is_err());
    }
    assert!(de_optimize(&sphere, &ParameterSpace::default(), &DeConfig::default()).is_err());
}

proptest! {
    #[test]
    fn reflection_lands_inside(v in -1e3f64..1e3, lo in -10.0f64..10.0, width in 1e-3f64..20.0) {
        let hi = lo + width;
        let r = reflect(v, lo, hi);
        prop_assert!(r >= lo && r <= hi);
        if (lo..=hi).contains(&v) {
            prop_assert_eq!(r, v);
        }
    }

    #[test]
    fn reflection_mirrors_small_overshoots(lo in -10.0f64..10.0, width in 1.0f64..20.0, d in 0.0f64..0.99) {
        let hi = lo + width;
        prop_assert!((reflect(hi + d, lo, hi) - (hi - d)).abs() < 1e-9);
        prop_assert!((reflect(lo - d, lo, hi) - (lo + d)).abs() < 1e-9);
    }
}
