//! File formats and workflows around `hallcav-core`: TOML run configs,
//! deterministic CSV output with JSON sidecars, and the `hallcav` binary's
//! butterfly, edges and evolve runs.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_flux, ConfigError, Mode, RunConfig};
pub use run::{run, run_butterfly, run_edges, run_evolve, RunError, RunSummary};
