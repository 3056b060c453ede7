#![allow(dead_code)]

use modal_sep::linalg::{induced_one_norm, sample_covariance};
use modal_sep::network::{forward, gradients, loss, GFunction, NetworkConfig, NetworkParams};
use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Distance kept between every `|·|` / `max` argument and its kink.
pub const KINK_MARGIN: f64 = 1e-3;
pub const FD_STEP: f64 = 1e-5;

pub fn random_point(seed: u64) -> (NetworkParams<f64>, Array2<f64>, NetworkConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n, b) = (4, 3, 24);
    let mut uni = |r: usize, c: usize| Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0));
    let params = NetworkParams {
        w1: uni(m, m),
        w2: uni(m, n),
        w3: uni(n, m),
    };
    let mut x = Array2::from_shape_fn((b, m), |_| rng.sample::<f64, _>(StandardNormal));
    let mean = x.mean_axis(Axis(0)).unwrap();
    x -= &mean;
    let g = match seed % 3 {
        0 => GFunction::G3,
        1 => GFunction::G1 { a1: 1.5 },
        _ => GFunction::G2,
    };
    let mut cfg = NetworkConfig::new(m, n);
    cfg.g_function = g;
    cfg.lambdas = [0.3, 0.2, 0.7, 0.5];
    (params, x, cfg)
}

fn minus_identity(mut a: Array2<f64>) -> Array2<f64> {
    for i in 0..a.nrows() {
        a[[i, i]] -= 1.0;
    }
    a
}

/// Every entry at least `KINK_MARGIN` from zero and the largest column sum
/// at least `KINK_MARGIN` above the runner-up.
fn clear_of_kinks(a: &Array2<f64>) -> bool {
    if a.iter().any(|v| v.abs() < KINK_MARGIN) {
        return false;
    }
    let mut sums: Vec<f64> = a.columns().into_iter().map(|c| c.iter().map(|v| v.abs()).sum()).collect();
    sums.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sums.len() < 2 || sums[0] - sums[1] >= KINK_MARGIN
}

pub fn is_smooth_point(p: &NetworkParams<f64>, x: &Array2<f64>, cfg: &NetworkConfig) -> bool {
    let act = forward(p, x.view()).unwrap();
    let gh = act.h.mapv(|v| cfg.g_function.value(v));
    let cov_h = minus_identity(sample_covariance(&act.h.view()).0);
    let orth = minus_identity(p.w1.dot(&p.w1.t()));
    let cov_q = minus_identity(sample_covariance(&act.q.view()).0);
    let _ = induced_one_norm(&gh.view());
    [gh, cov_h, orth, cov_q].iter().all(clear_of_kinks)
}

/// Largest per-coordinate relative error between the analytic gradient and
/// central differences, `|a − d| / max(|a|, |d|, 1e-6)`.
pub fn gradient_error(p: &NetworkParams<f64>, x: &Array2<f64>, cfg: &NetworkConfig) -> f64 {
    let g = gradients(p, x.view(), cfg).unwrap();
    let analytic = g.matrices();
    let mut worst = 0.0f64;
    for k in 0..3 {
        let dim = analytic[k].dim();
        for i in 0..dim.0 {
            for j in 0..dim.1 {
                let mut plus = p.clone();
                plus.matrices_mut()[k][[i, j]] += FD_STEP;
                let mut minus = p.clone();
                minus.matrices_mut()[k][[i, j]] -= FD_STEP;
                let lp = loss(&plus, x.view(), cfg).unwrap().total;
                let lm = loss(&minus, x.view(), cfg).unwrap().total;
                let fd = (lp - lm) / (2.0 * FD_STEP);
                let a = analytic[k][[i, j]];
                let err = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
                worst = worst.max(err);
            }
        }
    }
    worst
}

/// Errors at the first `count` smooth seeded points, with their seeds.
pub fn gradient_check(count: usize) -> Vec<(u64, f64)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        let (p, x, cfg) = random_point(seed);
        if is_smooth_point(&p, &x, &cfg) {
            out.push((seed, gradient_error(&p, &x, &cfg)));
        }
        seed += 1;
    }
    out
}
