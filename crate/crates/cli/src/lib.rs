//! `toa-lab`: runs time-of-arrival comparisons from a flat JSON config or
//! flags and writes CSV, JSON and SVG artifacts.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run_classical, run_densities, run_fig1, run_oracle_check, run_tails, RunError};
pub use config::{parse_config, ConfigError, ConfigFile, ScenarioConfig};
