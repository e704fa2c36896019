//! Verification harness: identity suites with JSON reports, and single evaluations.

pub mod config;
pub mod eval;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Settings};
pub use report::{CheckRecord, VerificationReport};
pub use suites::{run_suite, Suite};
