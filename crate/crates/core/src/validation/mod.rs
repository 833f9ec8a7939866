//! Statistical tests and the verification suites behind the acceptance run.

mod report;
pub mod stats;
mod suites;

pub use report::{Check, SuiteReport, ValidationReport};
pub use suites::{run_suite, run_suites, Suite};
