use super::{AnalysisError, PsdEstimate};
use crate::scalar::Real;

/// Location and strength of the dominant spectral peak in a band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T: Real> {
    /// Refined frequency (Hz).
    pub frequency: T,
    /// Grid index of the maximum bin.
    pub bin: usize,
    pub power: T,
    /// Peak power over the median power of the band.
    pub prominence: T,
}

/// Frequency of the largest PSD value in `band` (inclusive), refined by a
/// three-point parabola through the log-power of the peak bin and its
/// neighbours. Equal maxima resolve to the lower frequency.
pub fn pick_peak<T: Real>(psd: &PsdEstimate<T>, band: (T, T)) -> Result<T, AnalysisError> {
    locate_peak(psd, band).map(|p| p.frequency)
}

pub fn locate_peak<T: Real>(psd: &PsdEstimate<T>, band: (T, T)) -> Result<Peak<T>, AnalysisError> {
    let (lo, hi) = band;
    let idx: Vec<usize> = psd
        .frequencies
        .iter()
        .enumerate()
        .filter(|(_, &f)| f >= lo && f <= hi)
        .map(|(i, _)| i)
        .collect();
    let empty = || AnalysisError::EmptyBand {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
    };
    let mut best: Option<usize> = None;
    for &i in &idx {
        let p = psd.power[i];
        if p > T::zero() && best.map_or(true, |b| p > psd.power[b]) {
            best = Some(i);
        }
    }
    let k = best.ok_or_else(empty)?;
    let mut frequency = psd.frequencies[k];
    if k > 0 && k + 1 < psd.power.len() {
        let (a, b, c) = (psd.power[k - 1], psd.power[k], psd.power[k + 1]);
        if a > T::zero() && c > T::zero() {
            let (la, lb, lc) = (a.ln(), b.ln(), c.ln());
            let denom = la - T::lit(2.0) * lb + lc;
            if denom < T::zero() {
                let delta = T::lit(0.5) * (la - lc) / denom;
                if delta.abs() <= T::lit(0.5) {
                    frequency = frequency + delta * psd.resolution();
                }
            }
        }
    }
    let mut band_power: Vec<T> = idx.iter().map(|&i| psd.power[i]).collect();
    band_power.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = median_sorted(&band_power);
    let prominence = if median > T::zero() {
        psd.power[k] / median
    } else {
        T::infinity()
    };
    Ok(Peak {
        frequency,
        bin: k,
        power: psd.power[k],
        prominence,
    })
}

fn median_sorted<T: Real>(v: &[T]) -> T {
    let n = v.len();
    if n == 0 {
        T::zero()
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    }
}
