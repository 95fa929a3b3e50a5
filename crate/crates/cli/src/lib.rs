//! Library side of the `orichain` command-line tool: the JSON problem format,
//! canonical reports and the subcommand implementations.

pub mod commands;
pub mod error;
pub mod format;
pub mod off;

pub use error::CliError;
pub use format::{Label, LabelMap, Payload, ProblemFile};
