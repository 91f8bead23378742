//! Monte Carlo harness: configuration, seeded sweeps and CSV output.

mod config;
mod csv;
mod run;

pub use config::{parse_config, Algorithm, ConfigError, Preset, SimulationConfig, SweepKind, SweepPoint};
pub use csv::{format_g6, to_csv_string, write_csv, CSV_HEADER};
pub use run::{mean_std, run_point, run_sweep, run_trial, SimError, SweepRow, TrialOutcome, RHO};
