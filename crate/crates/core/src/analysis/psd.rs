use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::record::atomic_write;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
}

/// One-sided power spectral density on a uniform grid from 0 to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate<T: Real> {
    pub frequencies: Vec<T>,
    pub power: Vec<T>,
    pub window: Window,
    pub segment_length: usize,
    pub overlap: usize,
}

impl<T: Real> PsdEstimate<T> {
    pub fn resolution(&self) -> T {
        if self.frequencies.len() > 1 {
            self.frequencies[1] - self.frequencies[0]
        } else {
            T::zero()
        }
    }

    /// `Σ power · Δf`, the variance captured by the estimate.
    pub fn integrated_power(&self) -> T {
        self.power.iter().copied().sum::<T>() * self.resolution()
    }

    /// Two columns: `frequency_hz,power`.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut out = String::from("frequency_hz,power\n");
        for (f, p) in self.frequencies.iter().zip(&self.power) {
            out.push_str(&format!("{f},{p}\n"));
        }
        atomic_write(path, out.as_bytes())
    }
}

/// Welch segment settings. `segment_length: None` uses [`default_segment_length`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchParams {
    pub segment_length: Option<usize>,
    pub overlap_fraction: f64,
}

impl Default for WelchParams {
    fn default() -> Self {
        Self {
            segment_length: None,
            overlap_fraction: 0.5,
        }
    }
}

impl WelchParams {
    pub fn segment_for(&self, samples: usize) -> usize {
        self.segment_length.unwrap_or_else(|| default_segment_length(samples))
    }

    pub fn estimate<T: Real>(&self, signal: &[T], sample_rate: T) -> Result<PsdEstimate<T>, AnalysisError> {
        welch_psd(signal, sample_rate, self.segment_for(signal.len()), self.overlap_fraction)
    }
}

/// `N/4` rounded to the nearest power of two (ties go down), at least 8 and
/// never longer than the record.
pub fn default_segment_length(samples: usize) -> usize {
    let quarter = samples / 4;
    let mut p = 8usize;
    while p * 2 <= samples.max(8) && (p * 2).abs_diff(quarter) < p.abs_diff(quarter) {
        p *= 2;
    }
    p
}

/// Welch-averaged periodogram with Hann windows.
///
/// Each segment has its mean removed before windowing. Scaling is
/// `2|X_k|² / (fs·Σw²)` (DC and Nyquist not doubled), so the integrated
/// power approximates the signal variance.
pub fn welch_psd<T: Real>(
    signal: &[T],
    sample_rate: T,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<PsdEstimate<T>, AnalysisError> {
    let n = signal.len();
    if segment_length < 8 || n < segment_length {
        return Err(AnalysisError::TooShort {
            needed: segment_length.max(8),
            got: n,
        });
    }
    if !(0.0..=0.9).contains(&overlap_fraction) {
        return Err(AnalysisError::InvalidInput(format!(
            "overlap fraction {overlap_fraction} outside [0, 0.9]"
        )));
    }
    if !(sample_rate > T::zero()) {
        return Err(AnalysisError::InvalidInput("sample_rate must be positive".into()));
    }
    let overlap = ((segment_length as f64) * overlap_fraction).floor() as usize;
    let hop = (segment_length - overlap).max(1);
    let len_t = T::from_usize_lossy(segment_length);
    let two_pi = T::lit(2.0) * T::PI();
    // Periodic Hann window.
    let window: Vec<T> = (0..segment_length)
        .map(|i| T::lit(0.5) - T::lit(0.5) * (two_pi * T::from_usize_lossy(i) / len_t).cos())
        .collect();
    let window_power: T = window.iter().map(|&w| w * w).sum();

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(segment_length);
    let bins = segment_length / 2 + 1;
    let mut acc = vec![T::zero(); bins];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); segment_length];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + segment_length <= n {
        let seg = &signal[start..start + segment_length];
        let mean = seg.iter().copied().sum::<T>() / len_t;
        for ((b, &x), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((x - mean) * w, T::zero());
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = T::one() / (sample_rate * window_power * T::from_usize_lossy(segments));
    let two = T::lit(2.0);
    let nyquist_bin = if segment_length % 2 == 0 { Some(bins - 1) } else { None };
    let power: Vec<T> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let doubled = k != 0 && Some(k) != nyquist_bin;
            if doubled {
                a * scale * two
            } else {
                a * scale
            }
        })
        .collect();
    let df = sample_rate / len_t;
    let frequencies = (0..bins).map(|k| T::from_usize_lossy(k) * df).collect();
    Ok(PsdEstimate {
        frequencies,
        power,
        window: Window::Hann,
        segment_length,
        overlap,
    })
}
