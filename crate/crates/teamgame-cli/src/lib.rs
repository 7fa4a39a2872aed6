//! File formats, reports and subcommands of the `teamgame` binary.

pub mod commands;
pub mod formats;
pub mod report;

pub use commands::{run, Cli};
