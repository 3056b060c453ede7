//! Linear structural dynamics: system matrices, exact modal ground truth and
//! stochastic time integration.

mod eigen;
mod model;
mod newmark;

pub use eigen::{eigen_modes, generalized_eigen, ModalTruth};
pub use model::{benchmark_4dof, SystemModel};
pub use newmark::{
    newmark_integrate, newmark_integrate_forces, ExcitationKind, ExcitationSpec, InitialState,
    NewmarkIntegrator, NewmarkOptions,
};

use thiserror::Error;

use crate::record::RecordError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid system model: {0}")]
    InvalidModel(String),
    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("damping matrix is not Rayleigh-proportional for the stored coefficients")]
    NonClassicalDamping,
    #[error("effective stiffness matrix is singular")]
    SingularEffectiveStiffness,
    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Record(#[from] RecordError),
}
