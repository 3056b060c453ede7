//! Composite separation loss and its exact gradient.
//!
//! ```text
//! L = λ₁‖cov(H) − I‖₁ + λ₂‖G(H)‖₁ + λ₃‖W1·W1ᵀ − I‖₁ + λ₄‖cov(Q) − I‖₁
//!     + (1/B)·Σᵢⱼ (xᵢⱼ − x̂ᵢⱼ)²
//! ```
//!
//! `‖·‖₁` is the induced matrix 1-norm (largest absolute column sum) and
//! `cov` the unbiased sample covariance over batch rows. At kinks the
//! subgradient takes `sign(0) = 0` and the first maximizing column.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{forward, Activations, NetworkConfig, NetworkError, NetworkParams};
use crate::linalg::{induced_one_norm, sample_covariance};
use crate::scalar::{sign0, Real};

/// The five additive loss terms for one batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LossBreakdown<T: Real> {
    pub l_cov_h: T,
    pub l_gauss: T,
    pub l_orth_w1: T,
    pub l_cov_q: T,
    pub l_recon: T,
    pub total: T,
}

impl<T: Real> LossBreakdown<T> {
    /// Assembles the weighted total from the raw terms.
    pub fn from_terms(terms: [T; 5], lambdas: &[f64; 4]) -> Self {
        let [l_cov_h, l_gauss, l_orth_w1, l_cov_q, l_recon] = terms;
        let total = T::lit(lambdas[0]) * l_cov_h
            + T::lit(lambdas[1]) * l_gauss
            + T::lit(lambdas[2]) * l_orth_w1
            + T::lit(lambdas[3]) * l_cov_q
            + l_recon;
        Self {
            l_cov_h,
            l_gauss,
            l_orth_w1,
            l_cov_q,
            l_recon,
            total,
        }
    }

    pub fn terms(&self) -> [T; 5] {
        [self.l_cov_h, self.l_gauss, self.l_orth_w1, self.l_cov_q, self.l_recon]
    }
}

/// Gradient of the total loss with respect to each weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T: Real> {
    pub w1: Array2<T>,
    pub w2: Array2<T>,
    pub w3: Array2<T>,
}

impl<T: Real> Gradients<T> {
    pub fn matrices(&self) -> [&Array2<T>; 3] {
        [&self.w1, &self.w2, &self.w3]
    }
}

fn check_batch<T: Real>(batch: &ArrayView2<T>) -> Result<(), NetworkError> {
    if batch.nrows() < 2 {
        return Err(NetworkError::DegenerateBatch(batch.nrows()));
    }
    Ok(())
}

fn minus_identity<T: Real>(mut a: Array2<T>) -> Array2<T> {
    for i in 0..a.nrows().min(a.ncols()) {
        a[[i, i]] -= T::one();
    }
    a
}

/// Subgradient of `‖A‖₁` with respect to `A`: `sign(A)` on the first
/// maximizing column, zero elsewhere.
fn one_norm_subgradient<T: Real>(a: &Array2<T>) -> (T, Array2<T>) {
    let (value, col) = induced_one_norm(&a.view());
    let mut g = Array2::zeros(a.dim());
    for i in 0..a.nrows() {
        g[[i, col]] = sign0(a[[i, col]]);
    }
    (value, g)
}

struct Evaluation<T: Real> {
    act: Activations<T>,
    terms: [T; 5],
    // Pieces reused by the backward pass.
    cov_h_sub: Array2<T>,
    h_centered: Array2<T>,
    gauss_col: usize,
    orth_sub: Array2<T>,
    cov_q_sub: Array2<T>,
    q_centered: Array2<T>,
}

fn evaluate<T: Real>(
    params: &NetworkParams<T>,
    batch: ArrayView2<T>,
    config: &NetworkConfig,
) -> Result<Evaluation<T>, NetworkError> {
    check_batch(&batch)?;
    let act = forward(params, batch)?;
    let b = T::from_usize_lossy(batch.nrows());

    let (cov_h, h_centered) = sample_covariance(&act.h.view());
    let (l_cov_h, cov_h_sub) = one_norm_subgradient(&minus_identity(cov_h));

    let g = config.g_function;
    let gh = act.h.mapv(|v| g.value(v));
    let (l_gauss, gauss_col) = induced_one_norm(&gh.view());

    let orth = minus_identity(params.w1.dot(&params.w1.t()));
    let (l_orth_w1, orth_sub) = one_norm_subgradient(&orth);

    let (cov_q, q_centered) = sample_covariance(&act.q.view());
    let (l_cov_q, cov_q_sub) = one_norm_subgradient(&minus_identity(cov_q));

    let resid = &batch - &act.x_hat;
    let l_recon = resid.iter().fold(T::zero(), |s, &v| s + v * v) / b;

    Ok(Evaluation {
        act,
        terms: [l_cov_h, l_gauss, l_orth_w1, l_cov_q, l_recon],
        cov_h_sub,
        h_centered,
        gauss_col,
        orth_sub,
        cov_q_sub,
        q_centered,
    })
}

/// Evaluates every loss term on `batch` (`B×m`, `B ≥ 2`).
pub fn loss<T: Real>(
    params: &NetworkParams<T>,
    batch: ArrayView2<T>,
    config: &NetworkConfig,
) -> Result<LossBreakdown<T>, NetworkError> {
    let ev = evaluate(params, batch, config)?;
    Ok(LossBreakdown::from_terms(ev.terms, &config.lambdas))
}

/// Exact (sub)gradient of the total loss.
pub fn gradients<T: Real>(
    params: &NetworkParams<T>,
    batch: ArrayView2<T>,
    config: &NetworkConfig,
) -> Result<Gradients<T>, NetworkError> {
    loss_and_gradients(params, batch, config).map(|(_, g)| g)
}

/// Loss breakdown and gradient from a single forward pass.
pub fn loss_and_gradients<T: Real>(
    params: &NetworkParams<T>,
    batch: ArrayView2<T>,
    config: &NetworkConfig,
) -> Result<(LossBreakdown<T>, Gradients<T>), NetworkError> {
    let ev = evaluate(params, batch, config)?;
    let breakdown = LossBreakdown::from_terms(ev.terms, &config.lambdas);
    let [lam1, lam2, lam3, lam4] = config.lambdas.map(T::lit);
    let rows = batch.nrows();
    let b = T::from_usize_lossy(rows);
    let b1 = T::from_usize_lossy(rows - 1);
    let two = T::lit(2.0);

    // ∂/∂X̂ of the reconstruction term.
    let d_xhat = (&ev.act.x_hat - &batch) * (two / b);
    let grad_w3 = ev.act.q.t().dot(&d_xhat);

    // dL/dQ: reconstruction path plus layer-3 covariance term. For
    // C = QcᵀQc/(B−1), dL/dQ = Qc·(E + Eᵀ)/(B−1); the centering projection is
    // a no-op because Qc has zero column sums.
    let mut d_q = d_xhat.dot(&params.w3.t());
    if lam4 != T::zero() {
        let e = &ev.cov_q_sub + &ev.cov_q_sub.t();
        d_q = d_q + ev.q_centered.dot(&e) * (lam4 / b1);
    }
    let d_z = &d_q * &ev.act.q.mapv(|q| T::one() - q * q);
    let grad_w2 = ev.act.h.t().dot(&d_z);

    let mut d_h = d_z.dot(&params.w2.t());
    if lam1 != T::zero() {
        let e = &ev.cov_h_sub + &ev.cov_h_sub.t();
        d_h = d_h + ev.h_centered.dot(&e) * (lam1 / b1);
    }
    if lam2 != T::zero() {
        let g = config.g_function;
        let col = ev.gauss_col;
        for i in 0..rows {
            let h = ev.act.h[[i, col]];
            d_h[[i, col]] += lam2 * sign0(g.value(h)) * g.derivative(h);
        }
    }
    let mut grad_w1 = d_h.t().dot(&batch);
    if lam3 != T::zero() {
        let e = &ev.orth_sub + &ev.orth_sub.t();
        grad_w1 = grad_w1 + e.dot(&params.w1) * lam3;
    }

    Ok((
        breakdown,
        Gradients {
            w1: grad_w1,
            w2: grad_w2,
            w3: grad_w3,
        },
    ))
}
