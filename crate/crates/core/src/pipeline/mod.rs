//! Orchestration: ingest or simulate, preprocess, train, identify, report.
//!
//! The pipeline works in `f64`.

mod config;
mod preprocess;
mod report;
mod run;
mod synthetic;

pub use config::{
    AnalysisConfig, InputSource, PreprocessConfig, RunConfig, Scenario, SimulationConfig,
};
pub use preprocess::{ingest_csv, preprocess, Preprocessed};
pub use report::{emit_plot_series, ArtifactPaths, RunReport, TableRow};
pub use run::{
    identify, load_input, run_pipeline, run_pipeline_with_params, train_stage, Identification, LoadedInput, Trained,
};
pub use synthetic::{bridge_analog, simulate_modal_mixture, ModalMixture};

use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::dynamics::DynamicsError;
use crate::network::NetworkError;
use crate::record::RecordError;

/// A failure tagged with the pipeline stage that produced it.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(#[from] RecordError),
    #[error("simulate: {0}")]
    Simulate(#[from] DynamicsError),
    #[error("train: {0}")]
    Train(#[from] NetworkError),
    #[error("identify: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("output: cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl PipelineError {
    /// Process exit status: 2 config, 3 data, 4 divergence, 5 analysis.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Ingest(_) | Self::Output { .. } => 3,
            Self::Simulate(e) => match e {
                DynamicsError::InvalidModel(_)
                | DynamicsError::InvalidExcitation(_)
                | DynamicsError::InvalidInput(_) => 2,
                _ => 5,
            },
            Self::Train(e) => match e {
                NetworkError::Diverged { .. } => 4,
                NetworkError::InvalidConfig(_) | NetworkError::ShapeMismatch(_) | NetworkError::Parse(_) => 2,
                _ => 5,
            },
            Self::Analysis(_) => 5,
        }
    }

    pub(crate) fn output(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Self::Output {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

/// Worker threads the numeric kernels may use, from `MODAL_SEP_THREADS`.
///
/// All kernels currently run on the calling thread, so the effective count is
/// 1 whatever the cap; an unparsable or zero cap is a config error.
pub fn thread_count_from_env() -> Result<usize, PipelineError> {
    match std::env::var("MODAL_SEP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(1),
            _ => Err(PipelineError::Config(format!(
                "MODAL_SEP_THREADS must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(1),
    }
}
