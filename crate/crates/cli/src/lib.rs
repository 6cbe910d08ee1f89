//! File formats and command implementations behind the `twoway` binary.
//!
//! The numerics live in `twoway-core`; this crate adds flag parsing helpers,
//! the JSON and CSV artifact formats, and the subcommand drivers.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, Result};
