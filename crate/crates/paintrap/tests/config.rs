use std::path::Path;

use paintrap::config::{DwellConfig, MolassesConfig, RunConfig, ScheduleConfig};
use paintrap::core::evaporation::presets;
use paintrap::Error;

fn shipped(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&path).unwrap()
}

#[test]
fn empty_object_is_the_reference_setup() {
    let cfg = RunConfig::from_json("{}").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.schedule.to_core().unwrap(), presets::reference_schedule());
}

#[test]
fn json_round_trip_is_identical() {
    let mut cfg = RunConfig::default();
    cfg.molasses = Some(MolassesConfig::from(&presets::molasses()));
    cfg.painting.dwell = DwellConfig::Weights {
        weights: vec![0.1, 0.7, 1.0 / 3.0, 0.2],
    };
    cfg.model.three_body_m6_per_s = Some(4.3e-41);
    cfg.optimizer.threads = Some(3);
    let again = RunConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_json(), cfg.to_json());
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        r#"{"bogus": 1}"#,
        r#"{"schedule": {"hold": 0.02}}"#,
        r#"{"painting": {"dwell": {"shape": "uniform", "cells": 4, "extra": 1}}}"#,
        r#"{"molasses": {"atoms": 1e9, "temperature_K": 1e-5, "radius_m": 1e-3, "radius": 1}}"#,
    ] {
        let err = RunConfig::from_json(text).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{text}: {err}");
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn dimensioned_keys_carry_units() {
    let json: serde_json::Value = serde_json::from_str(&RunConfig::default().to_json()).unwrap();
    let ok_suffix = ["_W", "_m", "_Hz", "_K", "_Tpm", "_s", "_kg", "_J_per_K", "_J_s", "_m_per_s2", "_J_per_T", "_J_per_W_per_m2", "_m_per_Hz", "_m6_per_s"];
    let dimensioned = [
        "waist_x_m",
        "stroke_m",
        "hold_s",
        "P1_W",
        "Bp_Tpm",
        "center_frequency_Hz",
        "dt_s",
        "mass_kg",
    ];
    let mut keys = Vec::new();
    fn walk(v: &serde_json::Value, keys: &mut Vec<String>) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, v) in m {
                    keys.push(k.clone());
                    walk(v, keys);
                }
            }
            serde_json::Value::Array(a) => a.iter().for_each(|v| walk(v, keys)),
            _ => {}
        }
    }
    walk(&json, &mut keys);
    for d in dimensioned {
        assert!(keys.iter().any(|k| k == d), "missing {d}");
    }
    for k in keys.iter().filter(|k| k.contains("time") || k.contains("duration") || k.contains("power_")) {
        assert!(ok_suffix.iter().any(|s| k.ends_with(s)), "{k} lacks a unit");
    }
}

#[test]
fn invalid_values_are_validation_errors() {
    let cases = [
        r#"{"painting": {"dwell": {"shape": "weights", "weights": []}}}"#,
        r#"{"painting": {"dwell": {"shape": "weights", "weights": [0, 0]}}}"#,
        r#"{"integration": {"dt_s": 0}}"#,
        r#"{"loading": {"transfer_efficiency": 2}}"#,
        r#"{"optimizer": {"population": 3}}"#,
        r#"{"molasses": {"atoms": 1e9, "temperature_K": 1e-5, "radius_m": 1e-3},
            "laser_cooling": {"cooling_power": 0.5, "cooling_detuning_gamma": -8, "repump_power": 0.5,
            "repump_detuning_Hz": 0, "pump_power": 0.5, "pump_detuning_Hz": 0, "duration_s": 0.03}}"#,
        r#"{"beams": [{"waist_x_m": 0, "waist_y_m": 1e-6, "wavelength_m": 1e-6, "axis": [1,0,0], "focus_m": [0,0,0], "paint_axis": [0,1,0]},
                      {"waist_x_m": 1e-6, "waist_y_m": 1e-6, "wavelength_m": 1e-6, "axis": [0,1,0], "focus_m": [0,0,0], "paint_axis": [1,0,0]}]}"#,
    ];
    for text in cases {
        let err = RunConfig::from_json(text).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{text}: {err}");
    }
}

#[test]
fn schedule_jumps_survive_the_round_trip() {
    let mut schedule = presets::reference_schedule();
    schedule.segments[2].start.power[0] *= 0.5;
    schedule.segments[2].jump = true;
    let cfg = ScheduleConfig::from(&schedule);
    assert!(cfg.ramps[2].start.is_some());
    assert!(cfg.ramps.iter().enumerate().all(|(i, r)| i == 2 || r.start.is_none()));
    assert_eq!(cfg.to_core().unwrap(), schedule);
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    for name in ["painting_regimes.json", "reference_240ms.json", "fast_486ms.json", "optimize.json"] {
        let cfg = shipped(name);
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg, "{name}");
    }
    assert_eq!(shipped("fast_486ms.json").schedule.to_core().unwrap(), presets::fast_schedule());
}

#[test]
fn seed_override_reaches_every_seed() {
    let mut cfg = RunConfig::default();
    cfg.set_seed(42);
    assert_eq!(cfg.optimizer.seed, 42);
    assert_eq!(cfg.loading.seed, 42);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = RunConfig::load(Path::new("/nonexistent/run.json")).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
