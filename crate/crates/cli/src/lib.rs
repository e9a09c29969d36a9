//! Library side of the `trotter-order` command-line tool.

pub mod args;
pub mod campaign;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod records;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, Result};
