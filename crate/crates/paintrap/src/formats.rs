//! CSV and binary file formats.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use paintrap_core::evaporation::{Trajectory, TrajectoryPoint};
use paintrap_core::optimizer::{ParameterSpace, RunRecord};
use paintrap_core::painting::Waveform;
use paintrap_core::PhysicalConstants;

use crate::{Error, Result};

pub const WAVEFORM_HEADER: [&str; 3] = ["t_s", "f_Hz", "phase_rad"];

pub const TRAJECTORY_HEADER: [&str; 19] = [
    "t_s",
    "P1_W",
    "P2_W",
    "xs1_m",
    "xs2_m",
    "Bp_Tpm",
    "fx_Hz",
    "fy_Hz",
    "fz_Hz",
    "depth0_uK",
    "depthpm1_uK",
    "N_m1",
    "N_0",
    "N_p1",
    "T_K",
    "eta0",
    "gamma_el_Hz",
    "psd",
    "cond_frac",
];

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Writes `n_periods` periods as `t_s,f_Hz,phase_rad` rows. The phase is
/// the baseband phase relative to the centre frequency, continuing across
/// periods.
pub fn write_waveform_csv<W: Write>(w: &Waveform, n_periods: usize, out: W) -> csv::Result<()> {
    let mut wr = csv_writer(out);
    wr.write_record(WAVEFORM_HEADER)?;
    for k in 0..n_periods * w.samples_per_period() {
        let t = k as f64 / w.sample_rate;
        wr.write_record([num(t), num(w.frequency_at(k)), num(w.phase_at(k))])?;
    }
    wr.flush()?;
    Ok(())
}

/// Interleaved little-endian `f32` pairs `(cos φ, sin φ)`, no header.
pub fn iq_bytes(w: &Waveform, n_periods: usize) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(n_periods * w.samples_per_period() * 8);
    for (i, q) in w.iq(n_periods) {
        bytes.extend_from_slice(&(i as f32).to_le_bytes());
        bytes.extend_from_slice(&(q as f32).to_le_bytes());
    }
    bytes
}

pub fn parse_iq(bytes: &[u8]) -> Vec<(f32, f32)> {
    bytes
        .chunks_exact(8)
        .map(|c| {
            let i = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let q = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            (i, q)
        })
        .collect()
}

/// One row of a waveform CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSample {
    pub time: f64,
    pub frequency: f64,
    pub phase: f64,
}

pub fn read_waveform_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<WaveformSample>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(WAVEFORM_HEADER) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected waveform header {header:?}"),
        )));
    }
    rd.deserialize::<(f64, f64, f64)>()
        .map(|r| {
            r.map(|(time, frequency, phase)| WaveformSample {
                time,
                frequency,
                phase,
            })
        })
        .collect()
}

/// Rebuilds IQ samples from the frequency column alone: trapezoidal
/// integration of `2π (f - f_c)` at the sample spacing.
pub fn iq_from_frequencies(samples: &[WaveformSample], center_frequency: f64, sample_rate: f64) -> Vec<(f64, f64)> {
    let dt = 1.0 / sample_rate;
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        if k > 0 {
            let prev = samples[k - 1].frequency - center_frequency;
            phase += PI * (prev + s.frequency - center_frequency) * dt;
        }
        out.push((phase.cos(), phase.sin()));
    }
    out
}

fn trajectory_row(p: &TrajectoryPoint, constants: &PhysicalConstants) -> [String; 19] {
    let uk = |j: f64| j / constants.boltzmann * 1e6;
    let c = &p.controls;
    let [fx, fy, fz] = p.trap.frequencies;
    [
        num(p.time),
        num(c.power[0]),
        num(c.power[1]),
        num(c.stroke[0]),
        num(c.stroke[1]),
        num(c.gradient),
        num(fx),
        num(fy),
        num(fz),
        num(uk(p.trap.depth[1])),
        num(uk(p.trap.depth[0])),
        num(p.state.atoms[0]),
        num(p.state.atoms[1]),
        num(p.state.atoms[2]),
        num(p.state.temperature),
        num(p.eta[1]),
        num(p.collision_rate),
        num(p.psd),
        num(p.condensate_fraction),
    ]
}

pub fn write_trajectory_csv<W: Write>(t: &Trajectory, constants: &PhysicalConstants, out: W) -> csv::Result<()> {
    let mut wr = csv_writer(out);
    wr.write_record(TRAJECTORY_HEADER)?;
    for p in &t.points {
        wr.write_record(trajectory_row(p, constants))?;
    }
    wr.flush()?;
    Ok(())
}

/// `generation,member,objective,<parameter names>`, one row per
/// evaluation in evaluation order.
pub fn write_run_record_csv<W: Write>(record: &RunRecord, space: &ParameterSpace, out: W) -> csv::Result<()> {
    let mut wr = csv_writer(out);
    let mut header = vec!["generation".to_string(), "member".to_string(), "objective".to_string()];
    header.extend(space.parameters.iter().map(|p| p.name.clone()));
    wr.write_record(&header)?;
    for e in &record.evaluations {
        let mut row = vec![e.generation.to_string(), e.member.to_string(), num(e.objective)];
        row.extend(e.params.iter().map(|v| num(*v)));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Two-column CSV with the given header.
pub fn write_columns<W: Write>(header: &[&str], columns: &[&[f64]], out: W) -> csv::Result<()> {
    let mut wr = csv_writer(out);
    wr.write_record(header)?;
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        wr.write_record(columns.iter().map(|c| num(c[i])))?;
    }
    wr.flush()?;
    Ok(())
}

/// Creates `path` and runs `f` on a buffered writer, mapping failures.
pub fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> csv::Result<()>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    f(&mut buf).map_err(|e| Error::csv(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
