//! Synthetic experiments: truth and data generation on a refined mesh,
//! noise, reconstruction, error metrics, and parameter sweeps.

mod data;
mod metrics;
mod run;

pub use data::{add_noise, make_truth, synthesize_data, SyntheticData, Truth};
pub use metrics::{compute_metrics, Metrics, SPOTS};
pub use run::{
    run_batch, run_delta_sweep, run_experiment, run_all_problems, run_warmcold, sweep_csv, problems_csv, warmcold_csv,
    AlphaRule, ExperimentConfig, RunOutcome, SweepRow, WarmCold,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::fem2d::FemError;
use crate::gn::{GnError, ProblemKind};
use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("test {test_id} is not defined for the {kind} problem")]
    InvalidTest { test_id: u8, kind: ProblemKind },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("run with seed {seed}: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<BenchError>,
    },
    #[error("{path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Gn(#[from] GnError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
