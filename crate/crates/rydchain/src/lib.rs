//! Std companion to `rydchain-core`: parallel disorder sweeps, CSV and
//! manifest output, the plan text format and the `rydchain` command line.

pub mod cli;
mod error;
pub mod manifest;
pub mod planfile;
pub mod sweep;
pub mod table;

pub use error::{CliError, EXIT_CAPACITY, EXIT_NUMERICAL, EXIT_USAGE};
