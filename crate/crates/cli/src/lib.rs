//! Config-driven runner for the noisy-etc simulator: experiment presets,
//! TOML configurations, validation reports and CSV artifacts.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod report;
pub mod run;

pub use config::{Overrides, RunConfig};
pub use error::CliError;
pub use report::{validate, ValidationReport};
pub use run::{batch, run, run_preset, RunOutcome};
