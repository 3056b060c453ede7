use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{generalized_eigen, DynamicsError, SystemModel};
use crate::linalg::Lu;
use crate::record::{ResponseQuantity, ResponseRecord};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExcitationKind {
    GaussianWhite,
    None,
}

/// Stochastic nodal loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationSpec {
    pub kind: ExcitationKind,
    /// Force standard deviation per DOF (N).
    pub std_per_dof: Vec<f64>,
    pub seed: u64,
}

impl ExcitationSpec {
    pub fn white_noise(std_per_dof: Vec<f64>, seed: u64) -> Self {
        Self {
            kind: ExcitationKind::GaussianWhite,
            std_per_dof,
            seed,
        }
    }

    pub fn none(dofs: usize) -> Self {
        Self {
            kind: ExcitationKind::None,
            std_per_dof: vec![0.0; dofs],
            seed: 0,
        }
    }

    /// Draws the `samples × dofs` force history. Row `k` is applied at `t = k·Δt`.
    pub fn forces<T: Real>(&self, samples: usize) -> Result<Array2<T>, DynamicsError> {
        let dofs = self.std_per_dof.len();
        if self.std_per_dof.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(DynamicsError::InvalidExcitation(
                "std_per_dof must be finite and non-negative".into(),
            ));
        }
        let mut f = Array2::<T>::zeros((samples, dofs));
        if self.kind == ExcitationKind::GaussianWhite {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for mut row in f.rows_mut() {
                for (v, s) in row.iter_mut().zip(&self.std_per_dof) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v = T::lit(z * s);
                }
            }
        }
        Ok(f)
    }
}

/// Displacement and velocity at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState<T: Real> {
    pub displacement: Array1<T>,
    pub velocity: Array1<T>,
}

impl<T: Real> InitialState<T> {
    pub fn at_rest(dofs: usize) -> Self {
        Self {
            displacement: Array1::zeros(dofs),
            velocity: Array1::zeros(dofs),
        }
    }
}

/// Average-acceleration Newmark stepper (γ = 1/2, β = 1/4).
#[derive(Debug, Clone)]
pub struct NewmarkIntegrator<T: Real> {
    model: SystemModel<T>,
    dt: T,
    effective: Lu<T>,
    pub displacement: Array1<T>,
    pub velocity: Array1<T>,
    pub acceleration: Array1<T>,
}

const GAMMA: f64 = 0.5;
const BETA: f64 = 0.25;

impl<T: Real> NewmarkIntegrator<T> {
    pub fn new(
        model: &SystemModel<T>,
        dt: T,
        initial: &InitialState<T>,
        initial_force: ArrayView1<T>,
    ) -> Result<Self, DynamicsError> {
        let n = model.dofs();
        if initial.displacement.len() != n || initial.velocity.len() != n || initial_force.len() != n {
            return Err(DynamicsError::InvalidInput(format!(
                "initial state / force length must equal the {n} DOFs"
            )));
        }
        let beta = T::lit(BETA);
        let gamma = T::lit(GAMMA);
        let a0 = T::one() / (beta * dt * dt);
        let a1 = gamma / (beta * dt);
        let k_eff = &model.stiffness + &(&model.mass * a0) + &(&model.damping * a1);
        let effective = Lu::factor(&k_eff.view(), T::epsilon() * T::lit(16.0))
            .map_err(|_| DynamicsError::SingularEffectiveStiffness)?;
        let mass_lu = Lu::factor(&model.mass.view(), T::epsilon() * T::lit(16.0))
            .map_err(|_| DynamicsError::NotPositiveDefinite)?;
        let rhs = &initial_force
            - &model.damping.dot(&initial.velocity)
            - &model.stiffness.dot(&initial.displacement);
        let acceleration = mass_lu.solve(&rhs.view());
        Ok(Self {
            model: model.clone(),
            dt,
            effective,
            displacement: initial.displacement.clone(),
            velocity: initial.velocity.clone(),
            acceleration,
        })
    }

    /// Advances one step with the load applied at the end of the step.
    pub fn step(&mut self, force: ArrayView1<T>) {
        let dt = self.dt;
        let beta = T::lit(BETA);
        let gamma = T::lit(GAMMA);
        let a0 = T::one() / (beta * dt * dt);
        let a1 = gamma / (beta * dt);
        let a2 = T::one() / (beta * dt);
        let a3 = T::one() / (T::lit(2.0) * beta) - T::one();
        let a4 = gamma / beta - T::one();
        let a5 = dt / T::lit(2.0) * (gamma / beta - T::lit(2.0));
        let (x, v, a) = (&self.displacement, &self.velocity, &self.acceleration);
        let m_term = x * a0 + v * a2 + a * a3;
        let c_term = x * a1 + v * a4 + a * a5;
        let rhs = &force + &self.model.mass.dot(&m_term) + &self.model.damping.dot(&c_term);
        let x_new = self.effective.solve(&rhs.view());
        let a_new = (&x_new - x) * a0 - v * a2 - a * a3;
        let v_new = v + &((a * (T::one() - gamma) + &a_new * gamma) * dt);
        self.displacement = x_new;
        self.velocity = v_new;
        self.acceleration = a_new;
    }

    /// `½ vᵀMv + ½ xᵀKx`.
    pub fn mechanical_energy(&self) -> T {
        let half = T::lit(0.5);
        half * self.velocity.dot(&self.model.mass.dot(&self.velocity))
            + half * self.displacement.dot(&self.model.stiffness.dot(&self.displacement))
    }
}

/// Output and step control for the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewmarkOptions {
    pub output: ResponseQuantity,
    /// Integration steps per output sample. With 1 the step is `1/fs`; the
    /// force is held constant over the substeps of each sample interval.
    pub substeps: usize,
}

impl Default for NewmarkOptions {
    fn default() -> Self {
        Self {
            output: ResponseQuantity::Acceleration,
            substeps: 1,
        }
    }
}

impl NewmarkOptions {
    pub fn output(output: ResponseQuantity) -> Self {
        Self {
            output,
            ..Self::default()
        }
    }
}

/// Integrates the response to a prescribed force history (`samples × dofs`).
pub fn newmark_integrate_forces<T: Real>(
    model: &SystemModel<T>,
    forces: ArrayView2<T>,
    sample_rate: T,
    initial: &InitialState<T>,
    options: NewmarkOptions,
) -> Result<ResponseRecord<T>, DynamicsError> {
    let output = options.output;
    let substeps = options.substeps.max(1);
    let samples = forces.nrows();
    if samples < 2 {
        return Err(DynamicsError::InvalidInput(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    if forces.ncols() != model.dofs() {
        return Err(DynamicsError::InvalidInput(format!(
            "force history has {} columns for {} DOFs",
            forces.ncols(),
            model.dofs()
        )));
    }
    if !(sample_rate > T::zero()) {
        return Err(DynamicsError::InvalidInput("sample_rate must be positive".into()));
    }
    warn_if_undersampled(model, sample_rate);
    let dt = T::one() / (sample_rate * T::from_usize_lossy(substeps));
    let mut integ = NewmarkIntegrator::new(model, dt, initial, forces.row(0))?;
    let mut out = Array2::<T>::zeros((samples, model.dofs()));
    let pick = |it: &NewmarkIntegrator<T>| match output {
        ResponseQuantity::Acceleration => it.acceleration.clone(),
        ResponseQuantity::Displacement => it.displacement.clone(),
    };
    out.row_mut(0).assign(&pick(&integ));
    for k in 1..samples {
        for _ in 0..substeps {
            integ.step(forces.row(k));
        }
        out.row_mut(k).assign(&pick(&integ));
    }
    let labels = (1..=model.dofs()).map(|i| format!("dof{i}")).collect();
    ResponseRecord::new(out, sample_rate, labels, output).map_err(DynamicsError::from)
}

/// Simulates `round(duration · sample_rate)` samples under `excitation`.
pub fn newmark_integrate<T: Real>(
    model: &SystemModel<T>,
    excitation: &ExcitationSpec,
    duration: T,
    sample_rate: T,
    initial: &InitialState<T>,
    options: NewmarkOptions,
) -> Result<ResponseRecord<T>, DynamicsError> {
    if excitation.std_per_dof.len() != model.dofs() {
        return Err(DynamicsError::InvalidExcitation(format!(
            "std_per_dof has {} entries for {} DOFs",
            excitation.std_per_dof.len(),
            model.dofs()
        )));
    }
    let samples = (duration * sample_rate).round().to_usize().unwrap_or(0);
    if samples < 2 {
        return Err(DynamicsError::InvalidInput(format!(
            "duration·sample_rate must be at least 2, got {samples}"
        )));
    }
    let forces = excitation.forces::<T>(samples)?;
    let mut record = newmark_integrate_forces(model, forces.view(), sample_rate, initial, options)?;
    if excitation.kind == ExcitationKind::GaussianWhite {
        record.seed = Some(excitation.seed);
    }
    Ok(record)
}

fn warn_if_undersampled<T: Real>(model: &SystemModel<T>, sample_rate: T) {
    if let Ok((omega_sq, _)) = generalized_eigen(model) {
        let top = omega_sq.iter().fold(T::zero(), |m, &v| m.max(v));
        let f_max = top.sqrt() / (T::lit(2.0) * T::PI());
        if sample_rate <= T::lit(2.0) * f_max {
            log::warn!(
                "sample rate {sample_rate} Hz is below twice the highest natural frequency ({f_max} Hz)"
            );
        }
    }
}
