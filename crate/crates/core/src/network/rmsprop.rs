use ndarray::{Array2, Zip};

use super::{Gradients, NetworkConfig, NetworkParams};
use crate::scalar::Real;

/// Running mean of squared gradients, one accumulator per weight.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T: Real> {
    pub accum_g: [Array2<T>; 3],
    pub step: u64,
}

impl<T: Real> OptimizerState<T> {
    pub fn new(params: &NetworkParams<T>) -> Self {
        Self {
            accum_g: params.matrices().map(|m| Array2::zeros(m.dim())),
            step: 0,
        }
    }
}

/// One RMSProp update, elementwise:
///
/// ```text
/// G ← λ·G + (1 − λ)·g²
/// w ← w − γ̃·g / √(G + ε)
/// ```
pub fn rmsprop_step<T: Real>(
    params: &NetworkParams<T>,
    grads: &Gradients<T>,
    state: &OptimizerState<T>,
    config: &NetworkConfig,
) -> (NetworkParams<T>, OptimizerState<T>) {
    let mut params = params.clone();
    let mut state = state.clone();
    rmsprop_update(&mut params, grads, &mut state, config);
    (params, state)
}

/// In-place form of [`rmsprop_step`], used by the training loop.
pub fn rmsprop_update<T: Real>(
    params: &mut NetworkParams<T>,
    grads: &Gradients<T>,
    state: &mut OptimizerState<T>,
    config: &NetworkConfig,
) {
    let decay = T::lit(config.rms_decay);
    let keep = T::one() - decay;
    let lr = T::lit(config.learning_rate);
    let eps = T::lit(config.rms_epsilon);
    let grads = grads.matrices();
    for ((w, g), acc) in params.matrices_mut().into_iter().zip(grads).zip(state.accum_g.iter_mut()) {
        Zip::from(w).and(g).and(acc).for_each(|w, &g, acc| {
            *acc = decay * *acc + keep * g * g;
            *w -= lr / (*acc + eps).sqrt() * g;
        });
    }
    state.step += 1;
}
