//! Command-line driver for floydkit: scenario files, JSON and DOT output,
//! and one subcommand per experiment.

pub mod commands;
pub mod config;
pub mod dot;
pub mod error;
pub mod json;

pub use commands::{execute, run, Cli};
pub use error::CliError;
