//! Batch front end: parse a JSON run configuration, execute the requested
//! tasks in order, and write a JSON report plus CSV tables.

mod config;
mod report;
mod run;

pub use config::{ConfigError, EvalPoint, Overrides, RunConfig, Task};
pub use report::{format_sig17, write_table, RunReport, TaskReport, TaskStatus, TaskTiming, SCHEMA_VERSION};
pub use run::{run, RunError, RunOutcome, TaskError};
