//! Command-line front end: `gen`, `solve`, `phase`, `adaptivity` and
//! `clique`, each writing its artifacts plus a `manifest` into an output
//! directory.

mod args;
mod commands;
mod error;

pub use args::{parse_args, Key, Kind, RunConfig, Subcommand};
pub use commands::{run, MANIFEST};
pub use error::CliError;
