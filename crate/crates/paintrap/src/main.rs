use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paintrap::commands::{self, Benchmark, Stages, WaveformFormat};
use paintrap::{Result, RunConfig};

/// Painted optical dipole traps: waveforms, trap analysis, evaporation and
/// optimisation.
#[derive(Debug, Parser)]
#[command(name = "paintrap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON run configuration; defaults describe the reference setup.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`, default `out`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectra, averaged intensities and corrugation for each painting
    /// frequency.
    Paint {
        #[command(flatten)]
        common: Common,
    },
    /// Trap minimum, frequencies and per-level depths at one instant.
    Trap {
        #[command(flatten)]
        common: Common,
        /// Time within the schedule in s.
        #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
        at: f64,
        /// Exit with code 2 when the trap does not hold atoms.
        #[arg(long)]
        strict: bool,
    },
    /// Simulates the schedule and writes the trajectory and a summary.
    Evap {
        #[command(flatten)]
        common: Common,
    },
    /// Differential evolution over loading and/or evaporation parameters.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Only stage 1 (loading) or stage 2 (evaporation); both by default.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        stage: Option<u8>,
        /// Expected number of parameters; checked against the space.
        #[arg(long, value_name = "N")]
        params: Option<usize>,
        /// Analytic benchmark instead of the simulator: sphere, rosenbrock.
        #[arg(long, value_name = "NAME")]
        benchmark: Option<String>,
    },
    /// Writes the AOD drive waveform as CSV or raw IQ.
    ExportWaveform {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "csv|iq", default_value = "csv")]
        format: String,
    },
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").to_path_buf());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Paint { common } => {
            let (cfg, out) = load(&common)?;
            let report = commands::paint(&cfg, &out)?;
            for c in &report.cases {
                println!(
                    "{:<16} spacing {:.3e} m  corrugation {:.4}  {}{}",
                    c.label,
                    c.well_spacing_m,
                    c.corrugation,
                    c.regime,
                    if c.warnings.is_empty() {
                        String::new()
                    } else {
                        format!("  [{}]", c.warnings.join("; "))
                    }
                );
            }
        }
        Command::Trap { common, at, strict } => {
            let (cfg, out) = load(&common)?;
            let result = commands::trap(&cfg, at, &out, strict);
            let report = match &result {
                Ok(r) => r.clone(),
                Err(_) => {
                    // the report was still written; show it before failing
                    let path = out.join("trap.json");
                    if let Ok(text) = std::fs::read_to_string(&path) {
                        print!("{text}");
                    }
                    return result.map(|_| ());
                }
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
        }
        Command::Evap { common } => {
            let (cfg, out) = load(&common)?;
            let summary = commands::evap(&cfg, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serialises"));
        }
        Command::Optimize {
            common,
            stage,
            params,
            benchmark,
        } => {
            let (cfg, out) = load(&common)?;
            let stages = match (benchmark, stage) {
                (Some(name), _) => Stages::Benchmark(name.parse::<Benchmark>()?),
                (None, Some(1)) => Stages::Loading,
                (None, Some(_)) => Stages::Evaporation,
                (None, None) => Stages::Both,
            };
            let evaluator = commands::evaluator(&cfg)?;
            let report = commands::optimize(&cfg, &out, stages, params, &evaluator)?;
            println!("best objective {:e}", report.best_value);
            println!("parameters {}  evaluations {}", report.dimension, report.evaluations);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Command::ExportWaveform { common, format } => {
            let format: WaveformFormat = format.parse()?;
            let (cfg, out) = load(&common)?;
            let path = commands::export_waveform(&cfg, &out, format)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
