//! Command-line front end for `majorana-core`: JSON run configs in,
//! byte-reproducible JSON and CSV artifacts out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{Options, Outcome};
pub use config::RunConfig;
pub use error::{exit, CliError};
