use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::record::atomic_write;
use crate::scalar::Real;

/// Random-decrement signature: the average of signal segments that start at
/// each up-crossing of the trigger level.
#[derive(Debug, Clone, PartialEq)]
pub struct RdtSignature<T: Real> {
    /// Time lag of each point (s).
    pub lags: Vec<T>,
    pub amplitude: Vec<T>,
    pub trigger_level: T,
    pub segment_count: usize,
}

/// Below this many averaged segments a damping fit is flagged low-confidence.
pub const MIN_CONFIDENT_SEGMENTS: usize = 20;

impl<T: Real> RdtSignature<T> {
    pub fn is_confident(&self) -> bool {
        self.segment_count >= MIN_CONFIDENT_SEGMENTS
    }

    /// Two columns: `lag_s,amplitude`.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut out = String::from("lag_s,amplitude\n");
        for (l, a) in self.lags.iter().zip(&self.amplitude) {
            out.push_str(&format!("{l},{a}\n"));
        }
        atomic_write(path, out.as_bytes())
    }
}

/// Random-decrement settings: trigger at `trigger_sigma` standard deviations,
/// segments `periods` cycles of the frequency hint long.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RdtParams {
    pub trigger_sigma: f64,
    pub periods: f64,
}

impl Default for RdtParams {
    fn default() -> Self {
        Self {
            trigger_sigma: 1.0,
            periods: 10.0,
        }
    }
}

/// Level-crossing random decrement.
///
/// Triggers fire where the (mean-removed) signal crosses
/// `trigger_sigma · std` upwards. Each segment starts at the crossing instant
/// found by linear interpolation between the bracketing samples, so
/// `amplitude[0]` equals the trigger level up to interpolation error.
pub fn rdt_extract<T: Real>(
    signal: &[T],
    sample_rate: T,
    trigger_sigma: T,
    segment_seconds: T,
) -> Result<RdtSignature<T>, AnalysisError> {
    if !(sample_rate > T::zero()) || !(segment_seconds > T::zero()) {
        return Err(AnalysisError::InvalidInput(
            "sample_rate and segment length must be positive".into(),
        ));
    }
    let seg_len = (segment_seconds * sample_rate).round().to_usize().unwrap_or(0).max(2);
    let n = signal.len();
    if n < 10 * seg_len {
        return Err(AnalysisError::TooShort {
            needed: 10 * seg_len,
            got: n,
        });
    }
    let count = T::from_usize_lossy(n);
    let mean = signal.iter().copied().sum::<T>() / count;
    let x: Vec<T> = signal.iter().map(|&v| v - mean).collect();
    let std = (x.iter().map(|&v| v * v).sum::<T>() / count).sqrt();
    let level = trigger_sigma * std;

    let mut acc = vec![T::zero(); seg_len];
    let mut segments = 0usize;
    let mut crossings = 0usize;
    for k in 1..n {
        let (a, b) = (x[k - 1], x[k]);
        if !(a < level && b >= level) {
            continue;
        }
        crossings += 1;
        // Crossing at k − 1 + frac; the segment needs samples up to k − 1 + seg_len.
        if k + seg_len - 1 > n - 1 {
            continue;
        }
        let frac = (level - a) / (b - a);
        for (j, slot) in acc.iter_mut().enumerate() {
            let lo = x[k - 1 + j];
            let hi = x[k + j];
            *slot += lo + frac * (hi - lo);
        }
        segments += 1;
    }
    if crossings < 2 || segments == 0 {
        return Err(AnalysisError::NoTriggers(crossings));
    }
    let seg_t = T::from_usize_lossy(segments);
    let amplitude = acc.into_iter().map(|v| v / seg_t).collect();
    let lags = (0..seg_len).map(|j| T::from_usize_lossy(j) / sample_rate).collect();
    Ok(RdtSignature {
        lags,
        amplitude,
        trigger_level: level,
        segment_count: segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_signal_has_no_triggers() {
        assert!(matches!(
            rdt_extract(&[0.0f64; 1000], 10.0, 1.0, 5.0),
            Err(AnalysisError::NoTriggers(0))
        ));
    }

    #[test]
    fn sinusoid_is_reproduced() {
        let fs = 100.0;
        let f = 2.0;
        let x: Vec<f64> = (0..20_000).map(|k| (std::f64::consts::TAU * f * k as f64 / fs).sin()).collect();
        let sig = rdt_extract(&x, fs, 0.5, 2.0).unwrap();
        assert!((sig.amplitude[0] - sig.trigger_level).abs() <= 0.1 * sig.trigger_level);
        // Crossing of 0.5·std = 0.354 upwards occurs at phase asin(0.354).
        let phase = (sig.trigger_level).asin();
        for (lag, a) in sig.lags.iter().zip(&sig.amplitude) {
            let expect = (std::f64::consts::TAU * f * lag + phase).sin();
            assert!((a - expect).abs() < 2e-3, "lag {lag}: {a} vs {expect}");
        }
        assert!(sig.is_confident());
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            rdt_extract(&[1.0f64, -1.0, 1.0], 1.0, 1.0, 1.0),
            Err(AnalysisError::TooShort { .. })
        ));
    }
}
