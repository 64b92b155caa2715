//! Error metrics, CSV artifacts and reproducible experiments.

pub mod config;
pub mod csvio;
pub mod entropy;
pub mod experiment;
pub mod metrics;

pub use config::{ExperimentConfig, Overrides, Profile, FULL_ITERATIONS, QUICK_ITERATIONS};
pub use entropy::{fit_shocks, FittedShock};
pub use experiment::{run_experiment, run_experiment_with_progress, ExperimentReport, ReportData};
pub use metrics::{error_vs_reference, sample_for_comparison, ErrorSeries, FieldSource};
