//! Scenario layer over `hqsim-core`: structured configs, truncation policies,
//! parameter sweeps, reference-figure reproduction, validation studies and
//! the device coupling calculator. The `hqsim` binary is a thin dispatcher
//! over these modules so integration tests can drive them in process.

pub mod config;
pub mod couplings;
pub mod error;
pub mod figures;
pub mod output;
pub mod scenario;
pub mod studies;
pub mod sweep;

pub use error::{CliError, CliResult};
