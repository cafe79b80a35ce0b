//! Files, configuration and the command line around `esncache-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod memcap;
pub mod report;
pub mod sweep;
pub mod traces;

pub use config::ExperimentConfig;
pub use error::CliError;
