use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{
    newmark_integrate, DynamicsError, ExcitationSpec, InitialState, ModalTruth, NewmarkOptions, SystemModel,
};
use crate::record::ResponseRecord;

/// Independent modal oscillators observed through a fixed shape matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalMixture {
    /// Hz.
    pub frequencies: Vec<f64>,
    pub damping_ratios: Vec<f64>,
    /// `channels × modes`.
    pub shapes: Array2<f64>,
}

impl ModalMixture {
    pub fn truth(&self) -> ModalTruth<f64> {
        ModalTruth {
            frequencies: self.frequencies.clone(),
            damping_ratios: self.damping_ratios.clone(),
            damped_frequencies: self
                .frequencies
                .iter()
                .zip(&self.damping_ratios)
                .map(|(f, z)| f * (1.0 - z * z).sqrt())
                .collect(),
            shapes: self.shapes.clone(),
        }
    }

    /// Unit-mass oscillators `q̈ + 2ζω q̇ + ω² q = f`.
    pub fn modal_model(&self) -> Result<SystemModel<f64>, DynamicsError> {
        let w: Array1<f64> = self
            .frequencies
            .iter()
            .map(|f| 2.0 * std::f64::consts::PI * f)
            .collect();
        let z = Array1::from(self.damping_ratios.clone());
        SystemModel::new(
            Array2::eye(w.len()),
            Array2::from_diag(&w.mapv(|v| v * v)),
            Array2::from_diag(&(&w * &z * 2.0)),
            0.0,
            0.0,
        )
    }
}

/// Six sub-hertz modes typical of a long-span cable-stayed
/// bridge, seen by ten evenly spaced sensors along a simply supported span
/// (`φ_k(x) = sin(kπx)`).
pub fn bridge_analog() -> ModalMixture {
    let frequencies = vec![0.254, 0.303, 0.557, 0.635, 0.684, 0.781];
    let damping_ratios = vec![0.0092, 0.0061, 0.0072, 0.0056, 0.0058, 0.0082];
    let channels = 10;
    let shapes = Array2::from_shape_fn((channels, frequencies.len()), |(i, k)| {
        let x = (i + 1) as f64 / (channels + 1) as f64;
        ((k + 1) as f64 * std::f64::consts::PI * x).sin()
    });
    ModalMixture {
        frequencies,
        damping_ratios,
        shapes,
    }
}

/// Simulates every modal coordinate under independent white forcing (seed
/// `seed`), mixes them through the shapes and adds Gaussian noise with
/// standard deviation `noise_fraction ×` the channel RMS (seed `seed + 1`).
pub fn simulate_modal_mixture(
    mixture: &ModalMixture,
    samples: usize,
    sample_rate: f64,
    excitation_std: f64,
    noise_fraction: f64,
    seed: u64,
    options: NewmarkOptions,
) -> Result<ResponseRecord<f64>, DynamicsError> {
    let model = mixture.modal_model()?;
    let modes = mixture.frequencies.len();
    if mixture.shapes.ncols() != modes || mixture.damping_ratios.len() != modes {
        return Err(DynamicsError::InvalidModel(
            "shapes, frequencies and damping ratios disagree on the mode count".into(),
        ));
    }
    let excitation = ExcitationSpec::white_noise(vec![excitation_std; modes], seed);
    let q = newmark_integrate(
        &model,
        &excitation,
        samples as f64 / sample_rate,
        sample_rate,
        &InitialState::at_rest(modes),
        options,
    )?;
    let mut x = q.samples.dot(&mixture.shapes.t());
    add_measurement_noise(&mut x, noise_fraction, seed.wrapping_add(1));
    let labels = (1..=mixture.shapes.nrows()).map(|i| format!("s{i}")).collect();
    let mut record = ResponseRecord::new(x, sample_rate, labels, options.output)?;
    record.seed = Some(seed);
    Ok(record)
}

/// Adds Gaussian noise with standard deviation `fraction ×` each column's RMS.
pub(crate) fn add_measurement_noise(x: &mut Array2<f64>, fraction: f64, seed: u64) {
    if !(fraction > 0.0) {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for mut col in x.axis_iter_mut(Axis(1)) {
        let rms = (col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64).sqrt();
        for v in col.iter_mut() {
            let e: f64 = StandardNormal.sample(&mut rng);
            *v += fraction * rms * e;
        }
    }
}
