//! Command-line front end: JSON experiment configs, command dispatch and
//! deterministic table output.

pub mod config;
pub mod run;
pub mod suites;
pub mod table;

pub use config::{Command, ExperimentConfig, Suite, SuiteGrid};
pub use run::{run, RunOutcome};
pub use table::{Cell, ExperimentTable};
