use super::*;
use crate::optics::Beam;
use crate::painting::DwellDensity;

fn rb() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn beam_along_x(power: f64, waist: f64) -> Beam {
    Beam::new(power, waist, waist, 1064e-9, Vec3::x(), Vec3::zeros(), Vec3::y()).unwrap()
}

fn beam_along_y(power: f64, waist: f64) -> Beam {
    Beam::new(power, waist, waist, 1064e-9, Vec3::y(), Vec3::zeros(), Vec3::x()).unwrap()
}

fn single(beam: Beam, dwell: DwellDensity, gravity: bool) -> TrapConfig {
    let mut off = beam_along_y(0.0, 5e-6);
    off.power = 0.0;
    TrapConfig {
        beams: [PaintedBeam::new(beam, dwell), PaintedBeam::unpainted(off)],
        gradient: 0.0,
        gravity,
        constants: rb(),
    }
}

fn crossed(p1: f64, p2: f64, xs1: f64, xs2: f64, gradient: f64) -> TrapConfig {
    TrapConfig {
        beams: [
            PaintedBeam::new(beam_along_x(p1, 35e-6), DwellDensity::parabolic(xs1, 32).unwrap()),
            PaintedBeam::new(beam_along_y(p2, 5e-6), DwellDensity::parabolic(xs2, 32).unwrap()),
        ],
        gradient,
        gravity: true,
        constants: rb(),
    }
}

/// Analytic single-beam trap: depth |U0|, radial and axial frequencies.
fn gaussian_oracle(power: f64, waist: f64) -> (f64, f64, f64) {
    let c = rb();
    let u0 = c.dipole_coefficient.abs() * 2.0 * power / (PI * waist * waist);
    let z_r = PI * waist * waist / 1064e-9;
    let f_r = (4.0 * u0 / (c.mass * waist * waist)).sqrt() / (2.0 * PI);
    let f_ax = (2.0 * u0 / (c.mass * z_r * z_r)).sqrt() / (2.0 * PI);
    (u0, f_r, f_ax)
}

/// Vertical line scan: the lowest point of U(0, 0, z) with a local minimum
/// in the interior, if any.
fn vertical_scan_minimum(cfg: &TrapConfig, spin: SpinState, span: f64) -> Option<f64> {
    let n = 200_001;
    let values: std::vec::Vec<f64> = (0..n)
        .map(|i| {
            let z = -span + 2.0 * span * i as f64 / (n - 1) as f64;
            cfg.potential(&Vec3::new(0.0, 0.0, z), spin)
        })
        .collect();
    (1..n - 1)
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
}

#[test]
fn static_single_beam_matches_closed_forms() {
    let cfg = single(beam_along_x(20.0, 35e-6), DwellDensity::point_mass(), false);
    let (u0, f_r, f_ax) = gaussian_oracle(20.0, 35e-6);

    let min = find_minimum(&cfg, SpinState::Zero, Vec3::new(1e-6, -2e-6, 1e-6)).unwrap();
    // the axial direction is flat on the scale of the Rayleigh length
    assert!(min.y.abs() < 50e-9 && min.z.abs() < 50e-9, "{min}");
    assert!(min.x.abs() < 1e-3 * PI * 35e-6 * 35e-6 / 1064e-9, "{min}");
    let f = trap_frequencies(&cfg, SpinState::Zero, &min).unwrap();
    let [fx, fy, fz] = f.frequencies;
    assert!((fx - f_ax).abs() / f_ax < 0.01, "{fx} vs {f_ax}");
    assert!((fy - f_r).abs() / f_r < 0.01, "{fy} vs {f_r}");
    assert!((fz - f_r).abs() / f_r < 0.01, "{fz} vs {f_r}");

    let depth = trap_depth(&cfg, SpinState::Zero, &min, &f.axes);
    assert!((depth - u0).abs() / u0 < 0.01, "{depth} vs {u0}");
}

#[test]
fn symmetric_crossing_without_gravity_is_at_origin() {
    let mut cfg = crossed(5.0, 0.3, 0.0, 0.0, 0.0);
    cfg.gravity = false;
    assert!(cfg.crossing_point().norm() < 1e-15);
    let min = find_minimum(&cfg, SpinState::Zero, Vec3::new(2e-6, 1e-6, -1e-6)).unwrap();
    assert!(min.norm() < 20e-9, "{min}");
}

#[test]
fn gravity_sag_matches_vertical_scan() {
    let cfg = single(beam_along_x(0.2, 35e-6), DwellDensity::point_mass(), true);
    let min = find_minimum(&cfg, SpinState::Zero, Vec3::zeros()).unwrap();
    let scan = vertical_scan_minimum(&cfg, SpinState::Zero, 60e-6).unwrap();
    assert!(min.z < 0.0);
    assert!((min.z - scan).abs() < 20e-9, "{} vs {scan}", min.z);
}

#[test]
fn weak_beam_is_untrapped() {
    // below |U0| ≈ m g w / 1.21 no vertical barrier survives gravity
    let cfg = single(beam_along_x(0.02, 35e-6), DwellDensity::point_mass(), true);
    assert!(vertical_scan_minimum(&cfg, SpinState::Zero, 200e-6).is_none());
    let err = find_minimum(&cfg, SpinState::Zero, Vec3::zeros()).unwrap_err();
    assert!(err.is_untrapped(), "{err:?}");
}

#[test]
fn painting_lowers_paint_axis_frequency_only() {
    let w = 5e-6;
    let xs = 0.25 * w;
    let stat = single(beam_along_x(0.1, w), DwellDensity::point_mass(), false);
    let painted = single(beam_along_x(0.1, w), DwellDensity::uniform(xs, 64).unwrap(), false);
    let f0 = trap_frequencies(&stat, SpinState::Zero, &Vec3::zeros()).unwrap().frequencies;
    let f1 = trap_frequencies(&painted, SpinState::Zero, &Vec3::zeros()).unwrap().frequencies;
    // closed forms for a uniform dwell of half-width xs
    let r = xs / w;
    let paint_ratio = libm::exp(-2.0 * r * r).sqrt();
    let vert_ratio = ((PI / 8.0).sqrt() / r * libm::erf(2f64.sqrt() * r)).sqrt();
    assert!(f1[1] < f0[1]);
    assert!((f1[1] / f0[1] - paint_ratio).abs() < 0.01 * paint_ratio);
    assert!((f1[2] / f0[2] - vert_ratio).abs() < 0.01 * vert_ratio);
    assert!((f1[2] / f0[2] - 1.0).abs() < 0.05);
}

#[test]
fn swapping_waists_permutes_frequencies() {
    let mut b = beam_along_x(1.0, 20e-6);
    b.waist_y = 30e-6;
    let a = single(b, DwellDensity::point_mass(), false);
    (b.waist_x, b.waist_y) = (30e-6, 20e-6);
    let c = single(b, DwellDensity::point_mass(), false);
    let fa = trap_frequencies(&a, SpinState::Zero, &Vec3::zeros()).unwrap().frequencies;
    let fc = trap_frequencies(&c, SpinState::Zero, &Vec3::zeros()).unwrap().frequencies;
    assert!((fa[1] - fc[2]).abs() < 1e-6 * fa[1]);
    assert!((fa[2] - fc[1]).abs() < 1e-6 * fa[2]);
}

#[test]
fn hessian_symmetric_and_saddle_detected() {
    let cfg = crossed(8.0, 0.4, 300e-6, 50e-6, 0.3);
    let min = find_minimum(&cfg, SpinState::Zero, Vec3::zeros()).unwrap();
    let f = trap_frequencies(&cfg, SpinState::Zero, &min).unwrap();
    let h = f.hessian;
    let scale = h.abs().max();
    assert!((h - h.transpose()).abs().max() <= 1e-8 * scale);

    // beside a single beam, along the paint axis, the curvature is negative
    let single_beam = single(beam_along_x(1.0, 5e-6), DwellDensity::point_mass(), false);
    let err = trap_frequencies(&single_beam, SpinState::Zero, &Vec3::new(0.0, 4e-6, 0.0));
    assert!(matches!(err, Err(Error::SaddlePoint { .. })));
}

#[test]
fn magnetic_acceleration_at_67_gauss_per_cm() {
    let cfg = crossed(5.0, 0.3, 0.0, 0.0, 0.67);
    let c = rb();
    let oracle = c.bohr_magneton * 0.5 * 0.67 / c.mass;
    let a = cfg.magnetic_acceleration(SpinState::Plus);
    assert!((a - oracle).abs() < 1e-12 * oracle);
    assert!((a - 21.5).abs() < 0.5);
    assert!((a / 9.81 - 2.2).abs() < 0.05);
    assert_eq!(cfg.magnetic_acceleration(SpinState::Zero), 0.0);
    assert_eq!(cfg.magnetic_acceleration(SpinState::Minus), a);
}

#[test]
fn zero_level_ignores_gradient() {
    let a = crossed(5.0, 0.3, 200e-6, 40e-6, 0.0);
    let b = crossed(5.0, 0.3, 200e-6, 40e-6, 0.67);
    for p in [Vec3::new(1e-5, -3e-6, 2e-6), Vec3::new(0.0, 0.0, -4e-5)] {
        assert_eq!(a.potential(&p, SpinState::Zero), b.potential(&p, SpinState::Zero));
        assert!(b.potential(&p, SpinState::Plus) != a.potential(&p, SpinState::Plus));
    }
}

#[test]
fn distillation_lowers_outer_level_depths() {
    let cfg = crossed(4.0, 0.4, 0.0, 100e-6, 0.67);
    let ch = characterize(&cfg, Vec3::zeros(), MinimumSearch::default()).unwrap();
    assert!(ch.depth_of(SpinState::Plus) < ch.depth_of(SpinState::Zero));
    assert_eq!(ch.depth_of(SpinState::Plus), ch.depth_of(SpinState::Minus));
}

#[test]
fn depth_monotone_in_gradient() {
    let mut last_pm = f64::INFINITY;
    let mut zero = None;
    for g in [0.0, 0.2, 0.4, 0.67, 0.9] {
        let cfg = crossed(2.0, 0.2, 0.0, 60e-6, g);
        let ch = characterize(&cfg, Vec3::zeros(), MinimumSearch::default()).unwrap();
        let z = ch.depth_of(SpinState::Zero);
        if let Some(z0) = zero {
            assert_eq!(z, z0);
        }
        zero = Some(z);
        let pm = ch.depth_of(SpinState::Plus);
        assert!(pm <= last_pm * (1.0 + 1e-9), "g={g}: {pm} > {last_pm}");
        last_pm = pm;
    }
}

#[test]
fn depth_vanishes_at_finite_power_with_gravity() {
    // power scan: the depth decreases and hits zero before the power does
    let mut last = f64::INFINITY;
    let mut spilled_at = None;
    for i in 0..40 {
        let p = 0.2 * 0.85f64.powi(i);
        let cfg = single(beam_along_x(p, 35e-6), DwellDensity::point_mass(), true);
        match find_minimum(&cfg, SpinState::Zero, Vec3::zeros()) {
            Ok(min) => {
                let f = trap_frequencies(&cfg, SpinState::Zero, &min).unwrap();
                let d = trap_depth(&cfg, SpinState::Zero, &min, &f.axes);
                assert!(d < last);
                last = d;
            }
            Err(e) => {
                assert!(e.is_untrapped());
                spilled_at = Some(p);
                break;
            }
        }
    }
    let p = spilled_at.expect("trap never spilled");
    assert!(p > 0.01 && p < 0.05, "{p}");
}

#[test]
fn frequencies_scale_with_square_root_of_power() {
    let mut logs = std::vec::Vec::new();
    for p in [0.5, 1.0, 2.0, 5.0] {
        let cfg = single(beam_along_x(p, 35e-6), DwellDensity::point_mass(), false);
        let f = trap_frequencies(&cfg, SpinState::Zero, &Vec3::zeros()).unwrap().frequencies;
        logs.push((p, f));
    }
    let (p0, f0) = logs[0];
    for (p, f) in &logs[1..] {
        let expected = (p / p0).sqrt();
        for k in 0..3 {
            assert!((f[k] / f0[k] - expected).abs() < 0.01 * expected);
        }
    }
}

#[test]
fn characterization_is_deterministic() {
    let cfg = crossed(6.0, 0.45, 400e-6, 120e-6, 0.5);
    let a = characterize(&cfg, Vec3::zeros(), MinimumSearch::default()).unwrap();
    let b = characterize(&cfg, Vec3::zeros(), MinimumSearch::default()).unwrap();
    assert_eq!(a, b);
}
