//! Output-only modal identification.
//!
//! Structural responses are fed through a small self-coding network whose
//! hidden layer separates modal coordinates; frequencies and damping ratios
//! then come from PSD peak picking and random-decrement free-decay fits, and
//! mode shapes from the output-layer weights.
//!
//! All numerics are generic over [`Real`] (`f32`/`f64`); the `*64` aliases
//! below fix the scalar to `f64`, which the pipeline uses.

pub mod analysis;
pub mod dynamics;
pub mod linalg;
pub mod network;
pub mod pipeline;
pub mod record;
mod scalar;

pub use scalar::{sign0, Real};

pub type SystemModel64 = dynamics::SystemModel<f64>;
pub type ModalTruth64 = dynamics::ModalTruth<f64>;
pub type ResponseRecord64 = record::ResponseRecord<f64>;
pub type NetworkParams64 = network::NetworkParams<f64>;
pub type LossBreakdown64 = network::LossBreakdown<f64>;
pub type ModalEstimate64 = analysis::ModalEstimate<f64>;
pub type PsdEstimate64 = analysis::PsdEstimate<f64>;

pub type SystemModel32 = dynamics::SystemModel<f32>;
pub type ResponseRecord32 = record::ResponseRecord<f32>;
pub type NetworkParams32 = network::NetworkParams<f32>;
