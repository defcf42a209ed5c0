//! Experiment harness: config loading, Monte-Carlo sweeps and CSV output.

pub mod config;
pub mod experiment;
pub mod summary;

pub use config::{AlgoSelector, ConfigError, Overrides, RunConfig, Sweep};
pub use experiment::{run_experiment, write_outputs, ResultRow, RunError};
pub use summary::{summarize, Stats, SummaryError, SummaryRow};
