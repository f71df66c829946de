//! File formats and command implementations behind the `qfg` binary.
//!
//! Graphs and timelines are JSON documents (see [`files`]). Commands return
//! the text they print so they can be tested without spawning a process.

pub mod commands;
pub mod error;
pub mod files;
pub mod numfmt;

pub use error::{exit, CliError};
