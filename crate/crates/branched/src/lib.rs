//! File formats and command-line driver for `branched-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod golden;

pub use cli::{run, Cli};
pub use error::CliError;
