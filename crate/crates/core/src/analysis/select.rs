use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::{locate_peak, WelchParams};
use crate::scalar::Real;

/// Rules for discarding spurious separated responses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionCriteria {
    /// Minimum peak power over median band power.
    pub prominence: f64,
    /// Minimum distance between selected peaks, in PSD bins.
    pub min_separation_bins: f64,
    pub welch: WelchParams,
}

impl Default for SelectionCriteria {
    fn default() -> Self {
        Self {
            prominence: 10.0,
            min_separation_bins: 2.0,
            welch: WelchParams::default(),
        }
    }
}

/// Per-column peak statistics used by [`select_modes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnPeak<T: Real> {
    pub column: usize,
    pub frequency: T,
    pub prominence: T,
    pub resolution: T,
}

pub fn column_peaks<T: Real>(
    responses: ArrayView2<T>,
    sample_rate: T,
    welch: &WelchParams,
) -> Vec<Option<ColumnPeak<T>>> {
    responses
        .columns()
        .into_iter()
        .enumerate()
        .map(|(column, col)| {
            let trace = col.to_vec();
            let psd = welch.estimate(&trace, sample_rate).ok()?;
            let band = (psd.resolution(), sample_rate / T::lit(2.0));
            let peak = locate_peak(&psd, band).ok()?;
            Some(ColumnPeak {
                column,
                frequency: peak.frequency,
                prominence: peak.prominence,
                resolution: psd.resolution(),
            })
        })
        .collect()
}

/// Share of a signal's spectral power within `±band_fraction·f_peak` of its
/// dominant peak. Close to 1 for a single lightly damped mode, lower when
/// several modes are mixed into one response.
pub fn spectral_purity<T: Real>(signal: &[T], sample_rate: T, welch: &WelchParams, band_fraction: T) -> Option<T> {
    let psd = welch.estimate(signal, sample_rate).ok()?;
    let peak = locate_peak(&psd, (psd.resolution(), sample_rate / T::lit(2.0))).ok()?;
    let total: T = psd.power.iter().copied().sum();
    if !(total > T::zero()) {
        return None;
    }
    let half = band_fraction * peak.frequency;
    let near: T = psd
        .frequencies
        .iter()
        .zip(&psd.power)
        .filter(|(f, _)| (**f - peak.frequency).abs() <= half)
        .map(|(_, p)| *p)
        .sum();
    Some(near / total)
}

/// Columns whose spectrum has a clear, distinct peak.
///
/// Columns are visited in order of decreasing prominence; a column is kept
/// when its prominence reaches `criteria.prominence` and its peak lies at
/// least `min_separation_bins` bins from every column already kept. The
/// result is sorted by peak frequency.
pub fn select_modes<T: Real>(responses: ArrayView2<T>, sample_rate: T, criteria: &SelectionCriteria) -> Vec<usize> {
    let mut peaks: Vec<ColumnPeak<T>> = column_peaks(responses, sample_rate, &criteria.welch)
        .into_iter()
        .flatten()
        .collect();
    peaks.sort_by(|a, b| {
        b.prominence
            .partial_cmp(&a.prominence)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.column.cmp(&b.column))
    });
    let threshold = T::lit(criteria.prominence);
    let mut kept: Vec<ColumnPeak<T>> = Vec::new();
    for p in peaks {
        if !(p.prominence >= threshold) {
            continue;
        }
        let gap = T::lit(criteria.min_separation_bins) * p.resolution;
        if kept.iter().all(|k| (k.frequency - p.frequency).abs() >= gap) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap_or(std::cmp::Ordering::Equal));
    kept.into_iter().map(|p| p.column).collect()
}
