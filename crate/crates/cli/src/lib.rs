//! Library side of the `isac` command-line tool: configuration, CSV output,
//! subcommands and the acceptance suite.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod plot;
pub mod validate;

pub use config::RunConfig;
pub use error::{CliError, ConfigError};
