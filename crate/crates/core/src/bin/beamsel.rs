//! Monte Carlo beam selection sweeps with CSV output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use beamsel_core::sim::{run_sweep, write_csv, Preset, SimError, SimulationConfig};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "beamsel", version, about = "Beamspace MIMO beam selection sweeps")]
struct Args {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// snr, users, antennas or rf
    #[arg(long)]
    sweep: Option<String>,
    /// comma-separated sweep values
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// parallel or zf
    #[arg(long)]
    metric: Option<String>,
    /// fast or naive
    #[arg(long)]
    mode: Option<String>,
    /// comma-separated subset of ssvd,dsvd,isvd,mm,ia,fdzf,oracle
    #[arg(long)]
    algorithms: Option<String>,
    /// output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// fig1, fig2, fig3 or fig4
    #[arg(long)]
    preset: Option<String>,
}

const CONFIG_ERROR: u8 = 2;
const NUMERICAL_ERROR: u8 = 3;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("beamsel: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(CONFIG_ERROR);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };

    let preset = match args.preset.as_deref().map(str::parse::<Preset>).transpose() {
        Ok(p) => p,
        Err(e) => return fail(CONFIG_ERROR, e),
    };
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => return fail(CONFIG_ERROR, format!("{}: {e}", path.display())),
        },
        None => None,
    };
    let mut overrides: Vec<(&str, String)> = Vec::new();
    let flags = [
        ("sweep", args.sweep.clone()),
        ("values", args.values.clone()),
        ("trials", args.trials.map(|t| t.to_string())),
        ("seed", args.seed.map(|s| s.to_string())),
        ("metric", args.metric.clone()),
        ("mode", args.mode.clone()),
        ("algorithms", args.algorithms.clone()),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            overrides.push((key, value));
        }
    }
    let env_seed = std::env::var("BEAMSEL_SEED").ok();
    let cfg = match SimulationConfig::layered(env_seed.as_deref(), preset, text.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => return fail(CONFIG_ERROR, e),
    };

    let rows = match run_sweep(&cfg) {
        Ok(rows) => rows,
        Err(SimError::Config(e)) => return fail(CONFIG_ERROR, e),
        Err(e) => return fail(NUMERICAL_ERROR, e),
    };

    let written = match &args.out {
        Some(path) => File::create(path).and_then(|f| write_csv(&rows, BufWriter::new(f))),
        None => write_csv(&rows, io::stdout().lock()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(CONFIG_ERROR, e),
    }
}
