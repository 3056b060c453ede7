use ndarray::{array, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::linalg::{self, max_abs};
use crate::scalar::Real;

/// Linear time-invariant structure `M ẍ + C ẋ + K x = f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SystemModel<T: Real> {
    pub mass: Array2<T>,
    pub stiffness: Array2<T>,
    pub damping: Array2<T>,
    pub rayleigh_alpha: T,
    pub rayleigh_beta: T,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl<T: Real> SystemModel<T> {
    /// Builds a Rayleigh-damped model, `C = αM + βK`.
    pub fn rayleigh(
        mass: Array2<T>,
        stiffness: Array2<T>,
        alpha: T,
        beta: T,
    ) -> Result<Self, DynamicsError> {
        let damping = &mass * alpha + &stiffness * beta;
        Self::new(mass, stiffness, damping, alpha, beta)
    }

    /// Builds a model with an explicit damping matrix. The Rayleigh
    /// coefficients are stored as given and only checked by [`super::eigen_modes`].
    pub fn new(
        mass: Array2<T>,
        stiffness: Array2<T>,
        damping: Array2<T>,
        rayleigh_alpha: T,
        rayleigh_beta: T,
    ) -> Result<Self, DynamicsError> {
        let n = mass.nrows();
        for (name, m) in [("mass", &mass), ("stiffness", &stiffness), ("damping", &damping)] {
            if m.dim() != (n, n) {
                return Err(DynamicsError::InvalidModel(format!(
                    "{name} matrix is {:?}, expected {n}×{n}",
                    m.dim()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(DynamicsError::InvalidModel(format!("{name} matrix has non-finite entries")));
            }
        }
        if n == 0 {
            return Err(DynamicsError::InvalidModel("empty system".into()));
        }
        let tol = T::lit(SYMMETRY_TOL);
        if !linalg::is_symmetric(&mass.view(), tol) {
            return Err(DynamicsError::InvalidModel("mass matrix is not symmetric".into()));
        }
        if !linalg::is_symmetric(&stiffness.view(), tol) {
            return Err(DynamicsError::InvalidModel("stiffness matrix is not symmetric".into()));
        }
        if !(rayleigh_alpha >= T::zero()) || !(rayleigh_beta >= T::zero()) {
            return Err(DynamicsError::InvalidModel(
                "Rayleigh coefficients must be non-negative".into(),
            ));
        }
        linalg::cholesky(&mass.view()).map_err(|_| DynamicsError::NotPositiveDefinite)?;
        Ok(Self {
            mass,
            stiffness,
            damping,
            rayleigh_alpha,
            rayleigh_beta,
        })
    }

    pub fn dofs(&self) -> usize {
        self.mass.nrows()
    }

    /// Whether `C` equals `αM + βK` for the stored coefficients, to `tol`
    /// relative to the largest entry of `αM + βK` (absolute below unit scale).
    pub fn is_classically_damped(&self, tol: T) -> bool {
        let expected = &self.mass * self.rayleigh_alpha + &self.stiffness * self.rayleigh_beta;
        let diff = &self.damping - &expected;
        let scale = max_abs(&expected.view()).max(T::one());
        max_abs(&diff.view()) <= tol * scale
    }

    pub fn mass_view(&self) -> ArrayView2<'_, T> {
        self.mass.view()
    }
}

/// The 4-DOF spring-mass chain used as the identification benchmark:
/// `M = diag(1, 2, 3, 4)`, tridiagonal `K`, mass-proportional damping with
/// `α = 0.1`, `β = 0`.
pub fn benchmark_4dof<T: Real>() -> SystemModel<T> {
    let l = T::lit;
    let mass = array![
        [l(1.0), l(0.0), l(0.0), l(0.0)],
        [l(0.0), l(2.0), l(0.0), l(0.0)],
        [l(0.0), l(0.0), l(3.0), l(0.0)],
        [l(0.0), l(0.0), l(0.0), l(4.0)],
    ];
    let stiffness = array![
        [l(1000.0), l(-800.0), l(0.0), l(0.0)],
        [l(-800.0), l(2400.0), l(-1600.0), l(0.0)],
        [l(0.0), l(-1600.0), l(4800.0), l(-3200.0)],
        [l(0.0), l(0.0), l(-3200.0), l(8000.0)],
    ];
    SystemModel::rayleigh(mass, stiffness, l(0.1), l(0.0)).expect("benchmark matrices are valid")
}
