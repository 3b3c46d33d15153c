//! Experiment plans, sweep execution and report files for `parapam`.

pub mod plan;
pub mod report;
pub mod run;
pub mod svg;

pub use plan::{ExperimentKind, ExperimentPlan, Sweep, SweepPoint};
pub use report::Row;
pub use run::{resume, run_plan, Failure, Manifest, RunOptions, RunSummary};
