//! Benchmark harness: repeated k-fold cross-validation with nested
//! hyperparameter selection on SERA, a built-in kNN regressor, and the
//! aggregate reports (win counts, average ranks, training-size changes).

mod config;
mod knn;
mod report;
mod runner;

pub use config::{default_grid, Condition, ConditionEntry, DatasetEntry, ExperimentConfig, GridPoint};
pub use knn::knn_regressor_fit_predict;
pub use report::{avg_rank, size_report, win_table, write_reports, Metric, SizeRow};
pub use runner::{
    load_datasets, run_experiment, run_experiment_on, run_fold, ExperimentResult, Failure, FoldTrace, RunRecord,
    RunSettings, RunTiming,
};
