//! Command-line runs over the toolkit: argument grammar, JSON reports with a
//! fixed schema, and the verification suites behind `verify`.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod suites;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
pub use report::{Check, ReportDocument, RunConfig, SCHEMA_VERSION};
