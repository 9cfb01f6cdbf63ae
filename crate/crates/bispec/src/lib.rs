//! File formats, plotting and the command-line pipeline around `bispec-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod model_file;
pub mod report;
pub mod svg;
pub mod verify;

pub use error::{CliError, CliResult};
