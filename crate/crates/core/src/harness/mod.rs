//! Experiment runner: configs, seeded runs, CSV artifacts, aggregation and
//! the acceptance suite.

pub mod acceptance;
mod aggregate;
mod config;
mod output;
mod run;

pub use aggregate::{aggregate, collect_summaries, median, scaling_ratio, BatchReport, GroupReport, ScalingRatio, Stats};
pub use config::{
    build_learner, BenchmarkSpec, EnvironmentSpec, ExperimentConfig, Instance, PolicySpec, QStarRule,
};
pub use output::{
    format_float, read_rows, read_summaries, write_experiment, write_rows, write_summaries, CsvRow, CSV_HEADER,
    SUMMARY_HEADER,
};
pub use run::{
    run_experiment, run_experiment_with, run_seed, worker_count, ExperimentOutput, RunSummary, SeedRun,
    DIAGNOSTIC_TOLERANCE, THREADS_ENV,
};

/// Process exit codes of the command-line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG_ERROR: i32 = 1;
    pub const SOLVER_FAILURE: i32 = 2;
    pub const ACCEPTANCE_FAILURE: i32 = 3;
}
