//! Scenario files, the run loop, logging and metrics.

pub mod metrics;
pub mod record;
pub mod run;
pub mod scenario;

pub use metrics::{check_constraints, format_summary_table, ConstraintFlags, EnergyModel, Interval, RunSummary, Violations};
pub use record::{read_csv, write_csv, StepRecord, COLUMNS, CSV_SCHEMA_VERSION};
pub use run::{assumptions, compare, initialize, run, run_with, write_outputs, RunOutput, Simulation};
pub use scenario::{Scenario, TensionFeedback};
