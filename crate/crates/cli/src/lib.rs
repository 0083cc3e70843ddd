//! Command-line front end for `njk-core`: JSON input schemas, command dispatch and reports.
//!
//! Exit codes: 0 when the run succeeds and every checked structure is valid, 2 when a
//! validity check fails, 3 on unparseable input or arguments, 1 on IO errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;

pub use commands::run;
pub use config::{Format, RunConfig};
pub use error::CliError;
pub use report::{Report, Verdict};
