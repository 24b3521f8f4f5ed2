//! Experiment runner for exact Hamiltonian cellular automata.
//!
//! A run reads one JSON configuration, dispatches to the library, and writes
//! a report plus its artifacts. Identical configuration and seed give
//! byte-identical files.

pub mod config;
pub mod report;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, Format, Kind};
pub use report::{emit_report, Artifact, Check, EmitError, RunReport};
pub use run::{run, RunError};

/// Process exit codes.
pub mod exit {
    pub const PASSED: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG_INVALID: u8 = 2;
}
