//! Library half of the `weylsteer` command-line tool: file formats, run
//! specifications and the subcommand implementations.

pub mod commands;
pub mod error;
pub mod format;
pub mod runspec;

pub use error::{exit, CliError, CliResult};
