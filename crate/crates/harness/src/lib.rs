//! Scenario runner, invariant check suite and CSV tables for the
//! `spacetime-kinematics` library.

pub mod checks;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod tables;

pub use checks::{all_checks, run_check_suite, run_check_suite_seeded};
pub use error::{HarnessError, Result};
pub use report::{format_reports, CheckReport, Table};
pub use run::{run_scenario, ScenarioOutput};
pub use scenario::Scenario;
pub use tables::{emit_table, TableKind};
