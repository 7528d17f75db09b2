//! File formats and command implementations behind the `fles` binary.

pub mod commands;
pub mod format;

pub use commands::{run, Answer, Cli};
