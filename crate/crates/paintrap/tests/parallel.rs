use paintrap::core::optimizer::{de_optimize, de_optimize_with, DeConfig, ParameterSpace};
use paintrap::parallel::Parallel;

fn rastrigin(x: &[f64]) -> f64 {
    -x.iter()
        .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
        .sum::<f64>()
}

#[test]
fn thread_count_does_not_change_the_run() {
    let space = ParameterSpace::uniform(6, -5.12, 5.12);
    let cfg = DeConfig {
        population: 24,
        generations: 30,
        seed: 11,
        ..Default::default()
    };
    let reference = de_optimize(&rastrigin, &space, &cfg).unwrap();
    for threads in [1, 2, 4] {
        let pool = Parallel::new(Some(threads)).unwrap();
        assert_eq!(pool.threads(), threads);
        let r = de_optimize_with(&rastrigin, &space, &cfg, &pool).unwrap();
        assert_eq!(r.best, reference.best);
        assert_eq!(r.best_value.to_bits(), reference.best_value.to_bits());
        assert_eq!(r.record.best_so_far, reference.record.best_so_far);
        assert_eq!(r.record.evaluations.len(), reference.record.evaluations.len());
        for (a, b) in r.record.evaluations.iter().zip(&reference.record.evaluations) {
            assert_eq!((a.generation, a.member), (b.generation, b.member));
            assert_eq!(a.params, b.params);
            assert_eq!(a.objective.to_bits(), b.objective.to_bits());
            assert!(a.wall_time.is_some());
        }
    }
}

#[test]
fn zero_threads_is_a_config_error() {
    assert_eq!(Parallel::new(Some(0)).err().unwrap().exit_code(), 1);
}
