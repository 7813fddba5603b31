//! Experiment harness: parameter grids, cross-validation, benchmark
//! orchestration with a bounded worker pool, and the noisy-XOR stability
//! demo. Everything here is deterministic given a config and its seeds.

mod bench;
mod cv;
mod grids;
mod pool;
mod xor;

pub use bench::{
    run_benchmark, BenchmarkConfig, BenchmarkReport, CellOutcome, CellReport, DatasetEntry,
};
pub use cv::{cross_validate, fit_method, CvOutcome};
pub use grids::{default_grid, GridSpec};
pub use pool::run_jobs;
pub use xor::{xor_demo, xor_histories, XorDemoConfig, XorTrace, XorTraceRow};

use thiserror::Error;

use crate::data::DataError;
use crate::metrics::MetricsError;
use crate::model::ModelError;
use crate::train::TrainError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("grid invalid: {0}")]
    BadGrid(String),
    #[error("wall-clock budget exhausted")]
    TimedOut,
}
