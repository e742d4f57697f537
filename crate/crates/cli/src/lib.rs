//! Scenario-file front end for `qobserve`.
//!
//! A scenario is a JSON document describing a system, named states, scripts
//! and channels. The `qobserve` binary loads one (or several, for
//! `analyze`), validates it, runs the requested command and prints a JSON or
//! text report. Exit codes: 0 on success, 1 when the input is invalid, 2 when
//! a computation fails or a scenario's expectations are not met.

pub mod builtin;
pub mod cli;
pub mod commands;
pub mod error;
pub mod render;
pub mod scenario;

pub use cli::{run, Cli, Outcome};
pub use error::{CliError, CliResult};
pub use scenario::{load, parse, Overrides, Scenario};
