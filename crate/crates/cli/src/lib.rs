//! Library side of the `lrpulse` command-line tool: configuration, file
//! formats and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod verify;

pub use config::{parse_fraction, Plan, RunConfig, StrategyTag};
pub use error::{CliError, CliResult};
