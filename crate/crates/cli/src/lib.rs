//! File formats, JSON run reports and the `mwpam` command line on top of
//! [`mwpam_core`].

pub mod commands;
pub mod error;
pub mod format;
pub mod run_report;

pub use error::{exit, CliError};
pub use run_report::{RunReport, RUN_REPORT_SCHEMA};
