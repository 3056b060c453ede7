//! The four-layer self-coding separation network.
//!
//! Layer 1 takes the `m` response channels, layer 2 is a linear whitening
//! stage, layer 3 applies `tanh` to `n` separated modal responses, and layer 4
//! reconstructs the input. After training, layer-3 outputs estimate modal
//! coordinates and the layer-3 → layer-4 weights estimate mode shapes.

mod config;
mod extract;
mod forward;
mod loss;
mod negentropy;
mod params;
mod rmsprop;
mod train;

pub use config::{GFunction, NetworkConfig};
pub use extract::{
    extract_modal_responses, extract_mode_shapes, normalize_columns_max_abs, normalize_shape_rows,
    refit_shapes,
};
pub use forward::{forward, Activations};
pub use loss::{gradients, loss, loss_and_gradients, Gradients, LossBreakdown};
pub use negentropy::negentropy_estimate;
pub use params::{NetworkParams, ParamsDocument};
pub use rmsprop::{rmsprop_step, rmsprop_update, OptimizerState};
pub use train::{train, train_samples, write_trace_csv};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("batch of {0} rows is too small for a covariance estimate")]
    DegenerateBatch(usize),
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("selected responses are collinear")]
    RankDeficient,
    #[error("signal has zero variance")]
    ZeroVariance,
    #[error("cannot parse weights: {0}")]
    Parse(String),
}
