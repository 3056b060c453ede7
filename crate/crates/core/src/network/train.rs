use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{loss_and_gradients, rmsprop_update, LossBreakdown, NetworkConfig, NetworkError, NetworkParams, OptimizerState};
use crate::linalg::center_columns;
use crate::record::{atomic_write, ResponseRecord};
use crate::scalar::Real;

/// Trains on a response record. See [`train_samples`].
pub fn train<T: Real>(
    data: &ResponseRecord<T>,
    config: &NetworkConfig,
) -> Result<(NetworkParams<T>, Vec<LossBreakdown<T>>), NetworkError> {
    train_samples(data.samples.view(), config)
}

/// Mini-batch RMSProp training on `N×m` samples.
///
/// Columns are centered first. Weights are drawn from a generator seeded
/// with `config.seed`, which then also drives the per-epoch shuffles, so
/// identical inputs give identical weights. The returned trace holds one
/// entry per epoch: the mean of each term over that epoch's batches.
/// A trailing batch with a single row is skipped.
pub fn train_samples<T: Real>(
    data: ArrayView2<T>,
    config: &NetworkConfig,
) -> Result<(NetworkParams<T>, Vec<LossBreakdown<T>>), NetworkError> {
    config.validate()?;
    let (rows, cols) = data.dim();
    if cols != config.input_dim {
        return Err(NetworkError::ShapeMismatch(format!(
            "data has {cols} channels, config expects {}",
            config.input_dim
        )));
    }
    if rows < config.batch_size || rows < 2 {
        return Err(NetworkError::InvalidConfig(format!(
            "batch_size {} exceeds the {rows} available samples",
            config.batch_size
        )));
    }
    let x = center_columns(&data);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = NetworkParams::random_init(config.input_dim, config.separation_dim, &mut rng);
    let mut state = OptimizerState::new(&params);
    let mut order: Vec<usize> = (0..rows).collect();
    let mut trace = Vec::with_capacity(config.epochs);
    let mut batch = Array2::<T>::zeros((config.batch_size, cols));

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut sums = [T::zero(); 5];
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            if batch.nrows() != chunk.len() {
                batch = Array2::zeros((chunk.len(), cols));
            }
            for (dst, &src) in batch.axis_iter_mut(Axis(0)).zip(chunk) {
                let mut dst = dst;
                dst.assign(&x.row(src));
            }
            let (breakdown, grads) = loss_and_gradients(&params, batch.view(), config)?;
            if !breakdown.total.is_finite() {
                return Err(NetworkError::Diverged { epoch });
            }
            for (s, t) in sums.iter_mut().zip(breakdown.terms()) {
                *s += t;
            }
            batches += 1;
            rmsprop_update(&mut params, &grads, &mut state, config);
            if !params.is_finite() {
                return Err(NetworkError::Diverged { epoch });
            }
        }
        let count = T::from_usize_lossy(batches.max(1));
        let entry = LossBreakdown::from_terms(sums.map(|s| s / count), &config.lambdas);
        if !entry.total.is_finite() {
            return Err(NetworkError::Diverged { epoch });
        }
        if (epoch + 1) % 1000 == 0 {
            log::debug!("epoch {}: total loss {}", epoch + 1, entry.total);
        }
        trace.push(entry);
    }
    Ok((params, trace))
}

/// Writes `epoch,l_cov_h,l_gauss,l_orth_w1,l_cov_q,l_recon,total`.
pub fn write_trace_csv<T: Real>(trace: &[LossBreakdown<T>], path: &Path) -> std::io::Result<()> {
    let mut out = String::from("epoch,l_cov_h,l_gauss,l_orth_w1,l_cov_q,l_recon,total\n");
    for (epoch, l) in trace.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            epoch + 1,
            l.l_cov_h,
            l.l_gauss,
            l.l_orth_w1,
            l.l_cov_q,
            l.l_recon,
            l.total
        ));
    }
    atomic_write(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let cfg = NetworkConfig {
            epochs: 0,
            batch_size: 16,
            seed: 5,
            ..NetworkConfig::new(3, 2)
        };
        let (p, trace) = train_samples(noise(64, 3, 1).view(), &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(p, NetworkParams::random_init(3, 2, &mut rng));
        assert!(trace.is_empty());
    }

    #[test]
    fn deterministic_and_finite() {
        let cfg = NetworkConfig {
            epochs: 30,
            batch_size: 32,
            seed: 9,
            ..NetworkConfig::new(3, 3)
        };
        let data = noise(200, 3, 2);
        let (p1, t1) = train_samples(data.view(), &cfg).unwrap();
        let (p2, t2) = train_samples(data.view(), &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(t1, t2);
        assert_eq!(t1.len(), 30);
        assert!(t1.iter().all(|l| l.total.is_finite()));
    }

    #[test]
    fn batch_larger_than_data_is_rejected() {
        let cfg = NetworkConfig {
            batch_size: 128,
            ..NetworkConfig::new(2, 2)
        };
        assert!(matches!(
            train_samples(noise(100, 2, 0).view(), &cfg),
            Err(NetworkError::InvalidConfig(_))
        ));
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let cfg = NetworkConfig {
            epochs: 200,
            batch_size: 16,
            learning_rate: 1e30,
            ..NetworkConfig::new(2, 2)
        };
        let data = noise(64, 2, 3) * 1e100;
        assert!(matches!(
            train_samples(data.view(), &cfg),
            Err(NetworkError::Diverged { .. })
        ));
    }
}
