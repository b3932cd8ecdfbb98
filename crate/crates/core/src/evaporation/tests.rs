use super::*;
use crate::trap::SpinState;

fn quick_options() -> RunOptions {
    RunOptions {
        dt: 5e-5,
        recharacterize_every: 5e-3,
        ..Default::default()
    }
}

fn loaded() -> CloudState {
    CloudState::unpolarized(7.5e6, 18e-6)
}

#[test]
fn zero_duration_schedule_is_initial_state_only() {
    let mut s = presets::reference_schedule();
    s.segments.clear();
    s.hold = 0.0;
    s.ramp_up = 0.0;
    let t = run_schedule(&presets::crossed_setup(), &s, &loaded(), &quick_options()).unwrap();
    assert_eq!(t.points.len(), 1);
    assert_eq!(t.points[0].state, loaded());
    assert_eq!(t.points[0].time, 0.0);
}

#[test]
fn reference_run_invariants() {
    let t = run_schedule(
        &presets::crossed_setup(),
        &presets::reference_schedule(),
        &loaded(),
        &quick_options(),
    )
    .unwrap();
    let last = t.last().unwrap();
    assert!((last.time - 0.290).abs() < 1e-12);
    for pair in t.points.windows(2) {
        assert!(pair[1].time > pair[0].time);
        for i in 0..3 {
            assert!(pair[1].state.atoms[i] <= pair[0].state.atoms[i]);
        }
    }
    // distillation: m_F = 0 dominates at the end
    assert!(last.state.zero_fraction() > 0.9, "{}", last.state.zero_fraction());
    // the fraction never drops while the gradient is on and atoms evaporate
    for pair in t.points.windows(2) {
        if pair[0].controls.gradient > 0.0 {
            assert!(pair[1].state.zero_fraction() >= pair[0].state.zero_fraction() - 1e-12);
        }
    }
    for p in &t.points {
        if p.controls.gradient > 0.0 {
            assert!(p.trap.depth_of(SpinState::Plus) < p.trap.depth_of(SpinState::Zero));
        }
    }
}

#[test]
fn deterministic() {
    let run = || {
        run_schedule(
            &presets::crossed_setup(),
            &presets::fast_schedule(),
            &loaded(),
            &quick_options(),
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn halving_dt_converges() {
    let base = quick_options();
    let half = RunOptions { dt: base.dt / 2.0, ..base };
    let a = run_schedule(&presets::crossed_setup(), &presets::reference_schedule(), &loaded(), &base).unwrap();
    let b = run_schedule(&presets::crossed_setup(), &presets::reference_schedule(), &loaded(), &half).unwrap();
    let (a, b) = (a.last().unwrap().state, b.last().unwrap().state);
    assert!((a.total() / b.total() - 1.0).abs() < 1e-3);
    assert!((a.temperature / b.temperature - 1.0).abs() < 1e-3);
}

#[test]
fn empty_cloud_stays_empty() {
    let empty = CloudState::unpolarized(0.0, 18e-6);
    let t = run_schedule(&presets::crossed_setup(), &presets::fast_schedule(), &empty, &quick_options()).unwrap();
    assert!(t.points.iter().all(|p| p.state.total() == 0.0 && p.psd == 0.0 && p.condensate_fraction == 0.0));
}

#[test]
fn rejects_inconsistent_step_sizes() {
    let s = presets::reference_schedule();
    let coarse = RunOptions {
        recharacterize_every: 0.02,
        ..quick_options()
    };
    assert!(run_schedule(&presets::crossed_setup(), &s, &loaded(), &coarse).is_err());
    let inverted = RunOptions {
        dt: 1e-2,
        recharacterize_every: 5e-3,
        ..quick_options()
    };
    assert!(run_schedule(&presets::crossed_setup(), &s, &loaded(), &inverted).is_err());
}

#[test]
fn untrapped_failure_carries_time() {
    let mut s = presets::reference_schedule();
    // beam 2 switched off mid-way: the tight axis disappears
    s.segments[2].end.power = [0.0, 0.0];
    s.segments[3].start.power = [0.0, 0.0];
    let err = run_schedule(&presets::crossed_setup(), &s, &loaded(), &quick_options()).unwrap_err();
    match err {
        crate::Error::AtTime { time, .. } => assert!(time > 0.08 && time <= 0.125, "{time}"),
        other => panic!("unexpected {other:?}"),
    }
}

mod loading {
    use super::*;
    use crate::optics::Beam;
    use crate::trap::TrapConfig;

    fn beam_one_only(power: f64) -> TrapConfig {
        let setup = presets::crossed_setup();
        setup
            .trap_at(&Controls {
                power: [power, 0.0],
                stroke: [1.1e-3, 0.0],
                gradient: 0.0,
            })
            .unwrap()
    }

    /// Midpoint-rule overlap integral on a box around beam 1.
    fn grid_fraction(cfg: &TrapConfig, m: &Molasses) -> f64 {
        let kt = cfg.constants.boltzmann * m.temperature;
        let r2 = m.radius * m.radius;
        let (nx, ny, nz) = (120, 300, 100);
        let (hx, hy, hz) = (3.0 * m.radius, 1.5e-3, 100e-6);
        let (dx, dy, dz) = (2.0 * hx / nx as f64, 2.0 * hy / ny as f64, 2.0 * hz / nz as f64);
        let mut sum = 0.0;
        for i in 0..nx {
            let x = -hx + (i as f64 + 0.5) * dx;
            for j in 0..ny {
                let y = -hy + (j as f64 + 0.5) * dy;
                for k in 0..nz {
                    let z = -hz + (k as f64 + 0.5) * dz;
                    let p = crate::Vec3::new(x, y, z);
                    if cfg.optical_potential(&p).abs() > kt {
                        sum += libm::exp(-(x * x + y * y + z * z) / r2);
                    }
                }
            }
        }
        let norm = libm::pow(core::f64::consts::PI * r2, 1.5);
        sum * dx * dy * dz / norm
    }

    #[test]
    fn matches_grid_oracle() {
        let cfg = beam_one_only(20.0);
        let m = presets::molasses();
        let oracle = grid_fraction(&cfg, &m);
        let got = load_from_molasses(&cfg, &m, &LoadingOptions::default()).unwrap();
        let fraction = got.total() / m.atoms;
        assert!(oracle > 1e-3 && oracle < 0.1, "{oracle}");
        assert!((fraction / oracle - 1.0).abs() < 0.05, "{fraction} vs {oracle}");
        assert_eq!(got.atoms[0], got.atoms[1]);
        assert_eq!(got.temperature, m.temperature);
    }

    #[test]
    fn reference_settings_capture_little() {
        let setup = presets::crossed_setup();
        let cfg = setup.trap_at(&presets::initial_controls()).unwrap();
        let got = load_from_molasses(&cfg, &presets::molasses(), &LoadingOptions::default()).unwrap();
        let fraction = got.total() / presets::molasses().atoms;
        assert!(fraction > 0.0 && fraction < 0.05, "{fraction}");
    }

    #[test]
    fn zero_power_captures_nothing() {
        let cfg = beam_one_only(0.0);
        let got = load_from_molasses(&cfg, &presets::molasses(), &LoadingOptions::default()).unwrap();
        assert_eq!(got.total(), 0.0);
    }

    #[test]
    fn deep_wide_trap_captures_everything() {
        let mut cfg = beam_one_only(1.0);
        for (b, w) in cfg.beams.iter_mut().zip([30e-3, 30e-3]) {
            b.beam = Beam {
                power: 1e7,
                waist_x: w,
                waist_y: w,
                ..b.beam
            };
            b.dwell = crate::painting::DwellDensity::point_mass();
        }
        let got = load_from_molasses(&cfg, &presets::molasses(), &LoadingOptions::default()).unwrap();
        assert!((got.total() / presets::molasses().atoms - 1.0).abs() < 0.01, "{}", got.total());
    }

    #[test]
    fn transfer_efficiency_scales_linearly() {
        let cfg = beam_one_only(20.0);
        let full = load_from_molasses(&cfg, &presets::molasses(), &LoadingOptions::default()).unwrap();
        let tenth = load_from_molasses(&cfg, &presets::molasses(), &presets::loading_options()).unwrap();
        assert!((tenth.total() / full.total() - presets::TRANSFER_EFFICIENCY).abs() < 1e-12);
        let bad = LoadingOptions {
            transfer_efficiency: 0.0,
            ..Default::default()
        };
        assert!(load_from_molasses(&cfg, &presets::molasses(), &bad).is_err());
    }

    #[test]
    fn rejects_bad_molasses() {
        let cfg = beam_one_only(1.0);
        let bad = Molasses {
            temperature: 0.0,
            ..presets::molasses()
        };
        assert!(load_from_molasses(&cfg, &bad, &LoadingOptions::default()).is_err());
    }
}
