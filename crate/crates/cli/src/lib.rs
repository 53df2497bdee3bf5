//! Configuration, drivers and output for the `sbpdiss` command-line tool.

pub mod commands;
pub mod config;
pub mod output;
mod verify;

pub use commands::{run_command, Outcome, RunError};
pub use config::{parse_config, Command, ConfigError, ExperimentConfig};
pub use output::{Cell, ExperimentResult, MatrixDump, Table};
