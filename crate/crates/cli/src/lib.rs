//! Configuration-driven experiment harness for the `horolab` library.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::{run, RunReport, TimingReport};
