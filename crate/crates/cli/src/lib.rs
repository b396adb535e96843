//! Batch front end for the `mmw` engines: TOML configs in, CSV curves and
//! JSON sidecars out.

pub mod commands;
pub mod error;
pub mod grid;
pub mod output;
pub mod schema;

pub use commands::{run, run_study, Cli, Command, Report};
pub use error::CliError;
