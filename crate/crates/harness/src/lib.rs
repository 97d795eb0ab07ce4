//! Configuration, orchestration and reporting behind the `erfnn` command-line tool.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Config, ConfigError, Job};
pub use run::{run_jobs, ReportRow};
