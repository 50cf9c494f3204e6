//! Experiment harness for the `dta` learning library: capacity sweeps, the
//! two-spike interference map, IRIS classification and the distance
//! threshold refit. Every run is a pure function of its config and master
//! seed; the worker count only changes how fast it finishes.

use thiserror::Error;

pub mod config;
pub mod experiments;
pub mod records;
pub mod seeds;

pub use config::{ExperimentConfig, ExperimentKind, Method};
pub use records::{Outcome, TrialRecord};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Learning(#[from] dta::learning::LearningError),
    #[error(transparent)]
    Neuron(#[from] dta::neuron::NeuronError),
    #[error(transparent)]
    Data(#[from] dta::datagen::DataError),
    #[error(transparent)]
    Baseline(#[from] dta::baselines::BaselineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
