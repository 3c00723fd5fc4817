//! Experiment harness behind the `dirsimplex` binary.

pub mod bench;
pub mod commands;
pub mod config;
pub mod error;
pub mod expressivity;

pub use config::{ExperimentConfig, Profile};
pub use error::{CliError, Result};
