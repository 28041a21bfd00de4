//! Library half of the `cheshire` binary: config loading, CSV round trip,
//! JSON outputs, and the command implementations. Kept as a library so the
//! integration tests can drive commands in-process as well as through the
//! spawned binary.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod output;

pub use commands::{cmd_analyze, cmd_scan, cmd_table1, cmd_weak_values};
pub use config::{ConfigMode, RunConfig};
pub use error::CliError;
