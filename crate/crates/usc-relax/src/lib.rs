//! Command-line front end: configuration, parameter scans and table output.

pub mod commands;
pub mod config;
pub mod scan;

pub use commands::Command;
pub use config::{Format, RunConfig};
pub use scan::ScanResult;
