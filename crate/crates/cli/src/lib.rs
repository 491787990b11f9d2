//! Command-line front end: configuration, subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError, Command};
pub use config::{ConfigError, RunConfig};
