use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{GFunction, NetworkError};
use crate::scalar::Real;

/// Approximate negentropy `[E{G(s)} − E{G(v)}]²` of a signal.
///
/// The signal is standardized internally. `E{G(v)}` for a standard normal
/// `v` is a Monte Carlo average over `mc_samples` seeded draws. This is a
/// diagnostic; training uses the loss terms directly.
pub fn negentropy_estimate<T: Real>(
    signal: &[T],
    g: GFunction,
    mc_samples: usize,
    seed: u64,
) -> Result<T, NetworkError> {
    let n = signal.len();
    if n < 2 {
        return Err(NetworkError::ZeroVariance);
    }
    let count = T::from_usize_lossy(n);
    let mean = signal.iter().copied().sum::<T>() / count;
    let var = signal.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / count;
    if !(var > T::zero()) {
        return Err(NetworkError::ZeroVariance);
    }
    let sd = var.sqrt();
    let e_signal = signal.iter().map(|&v| g.value((v - mean) / sd)).sum::<T>() / count;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0f64;
    for _ in 0..mc_samples.max(1) {
        let v: f64 = StandardNormal.sample(&mut rng);
        acc += g.value(v);
    }
    let e_gauss = T::lit(acc / mc_samples.max(1) as f64);
    let d = e_signal - e_gauss;
    Ok(d * d)
}
