//! Implementation of the `sketchkit` command-line tool.
//!
//! The binary in `main.rs` is a thin argument-parsing shell; the commands
//! themselves live in [`commands`], the reporting types in [`report`], and
//! the bundled corpus with its golden suite in [`corpus`]. Integration
//! tests drive the same functions the binary does.

pub mod commands;
pub mod corpus;
pub mod report;

pub use commands::{CliError, CommandOutput, Mode};
pub use report::{Report, Verdict, SCHEMA_VERSION};
