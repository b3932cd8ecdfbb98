//! Derivative-free Nelder-Mead descent in three dimensions.

use crate::Vec3;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    pub initial_step: f64,
    /// Converged once every vertex is within this distance of the best one.
    pub diameter_tolerance: f64,
    pub max_iterations: usize,
    /// Abort if the best vertex wanders farther than this from the seed.
    pub escape_radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum SimplexOutcome {
    Converged { point: Vec3 },
    Escaped { point: Vec3 },
    Exhausted { point: Vec3, diameter: f64, iterations: usize },
}

pub(crate) fn minimize(f: impl Fn(&Vec3) -> f64, seed: Vec3, opts: SimplexOptions) -> SimplexOutcome {
    let mut vertices = [
        seed,
        seed + Vec3::x() * opts.initial_step,
        seed + Vec3::y() * opts.initial_step,
        seed + Vec3::z() * opts.initial_step,
    ];
    let mut values = vertices.map(|v| f(&v));

    for iteration in 0..opts.max_iterations {
        // sort ascending
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.map(|i| vertices[i]);
        values = order.map(|i| values[i]);

        let best = vertices[0];
        if (best - seed).norm() > opts.escape_radius {
            return SimplexOutcome::Escaped { point: best };
        }
        let diameter = vertices[1..]
            .iter()
            .map(|v| (v - best).norm())
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tolerance {
            return SimplexOutcome::Converged { point: best };
        }
        if iteration + 1 == opts.max_iterations {
            return SimplexOutcome::Exhausted {
                point: best,
                diameter,
                iterations: opts.max_iterations,
            };
        }

        let centroid = (vertices[0] + vertices[1] + vertices[2]) / 3.0;
        let worst = vertices[3];
        let reflected = centroid + (centroid - worst);
        let f_r = f(&reflected);
        if f_r < values[0] {
            let expanded = centroid + 2.0 * (centroid - worst);
            let f_e = f(&expanded);
            if f_e < f_r {
                vertices[3] = expanded;
                values[3] = f_e;
            } else {
                vertices[3] = reflected;
                values[3] = f_r;
            }
            continue;
        }
        if f_r < values[2] {
            vertices[3] = reflected;
            values[3] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[3] {
            let c = centroid + 0.5 * (reflected - centroid);
            (c, f(&c))
        } else {
            let c = centroid + 0.5 * (worst - centroid);
            (c, f(&c))
        };
        if f_c < values[3].min(f_r) {
            vertices[3] = contracted;
            values[3] = f_c;
            continue;
        }
        for i in 1..4 {
            vertices[i] = best + 0.5 * (vertices[i] - best);
            values[i] = f(&vertices[i]);
        }
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions {
        SimplexOptions {
            initial_step: 1e-6,
            diameter_tolerance: 1e-9,
            max_iterations: 5000,
            escape_radius: 1e-3,
        }
    }

    #[test]
    fn finds_anisotropic_quadratic_minimum() {
        let target = Vec3::new(1e-6, -3e-6, 2e-7);
        let f = |p: &Vec3| {
            let d = p - target;
            3.0 * d.x * d.x + 0.2 * d.y * d.y + 50.0 * d.z * d.z + d.x * d.y
        };
        match minimize(f, Vec3::zeros(), opts()) {
            SimplexOutcome::Converged { point } => assert!((point - target).norm() < 1e-8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn escapes_on_linear_slope() {
        let f = |p: &Vec3| p.z;
        assert!(matches!(
            minimize(f, Vec3::zeros(), opts()),
            SimplexOutcome::Escaped { .. }
        ));
    }
}
