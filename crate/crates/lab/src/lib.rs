//! Monte-Carlo experiments over `fppflow-core`: configuration files, law
//! literals, estimators, artifact writers and the `fppflow` command line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod literal;
pub mod records;
pub mod report;
pub mod runner;
pub mod stats;

pub use config::Config;
pub use error::LabError;
pub use report::Report;
pub use runner::{run, Outcome, RunOptions};
