use ndarray::{Array2, ArrayView2, Axis};

use super::{NetworkError, NetworkParams};
use crate::scalar::Real;

/// Layer outputs for one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations<T: Real> {
    /// Layer 2 (linear), `B×m`.
    pub h: Array2<T>,
    /// Layer 3 after `tanh`, `B×n`.
    pub q: Array2<T>,
    /// Reconstruction, `B×m`.
    pub x_hat: Array2<T>,
}

/// `H = X·W1ᵀ`, `Q = tanh(H·W2)`, `X̂ = Q·W3`.
pub fn forward<T: Real>(params: &NetworkParams<T>, batch: ArrayView2<T>) -> Result<Activations<T>, NetworkError> {
    params.check_shapes()?;
    if batch.ncols() != params.input_dim() {
        return Err(NetworkError::ShapeMismatch(format!(
            "batch has {} columns, network expects {}",
            batch.ncols(),
            params.input_dim()
        )));
    }
    let h = batch.dot(&params.w1.t());
    let q = h.dot(&params.w2).mapv(|v| v.tanh());
    let x_hat = q.dot(&params.w3);
    Ok(Activations { h, q, x_hat })
}

/// Logs a warning for channels whose mean is large next to their RMS.
pub(crate) fn warn_if_uncentered<T: Real>(batch: &ArrayView2<T>) {
    let rows = batch.nrows();
    if rows < 2 {
        return;
    }
    let count = T::from_usize_lossy(rows);
    for (j, col) in batch.axis_iter(Axis(1)).enumerate() {
        let mean = col.sum() / count;
        let rms = (col.iter().fold(T::zero(), |s, &v| s + v * v) / count).sqrt();
        if rms > T::zero() && mean.abs() > T::lit(0.5) * rms {
            log::warn!("input column {j} is far from zero mean ({mean} vs rms {rms})");
        }
    }
}
