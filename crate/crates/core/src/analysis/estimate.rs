use serde::{Deserialize, Serialize};

use super::{fit_damping, locate_peak, rdt_extract, AnalysisError, RdtParams, RdtSignature, WelchParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Ok,
    Low,
}

/// One identified mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModalEstimate<T: Real> {
    /// Hz.
    pub frequency: T,
    pub damping_ratio: T,
    /// Max-abs normalized, largest component positive.
    pub shape: Vec<T>,
    #[serde(skip)]
    pub response_trace: Vec<T>,
    pub confidence: Confidence,
}

/// Post-processing settings for one separated response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct AnalysisParams {
    pub welch: WelchParams,
    pub rdt: RdtParams,
}

/// Everything computed while turning one response into a [`ModalEstimate`].
#[derive(Debug, Clone)]
pub struct ModeAnalysis<T: Real> {
    pub estimate: ModalEstimate<T>,
    pub psd: super::PsdEstimate<T>,
    pub signature: Option<RdtSignature<T>>,
}

/// Frequency by PSD peak picking, damping by random decrement and envelope
/// fit. Damping failures (too few triggers or envelope peaks, a record too
/// short for the requested segment) yield `ζ = 0` with low confidence;
/// a response with no spectral peak at all is an error.
pub fn analyze_response<T: Real>(
    trace: &[T],
    shape: Vec<T>,
    sample_rate: T,
    params: &AnalysisParams,
) -> Result<ModeAnalysis<T>, AnalysisError> {
    let psd = params.welch.estimate(trace, sample_rate)?;
    let nyquist = sample_rate / T::lit(2.0);
    let peak = locate_peak(&psd, (psd.resolution(), nyquist))?;
    let frequency = peak.frequency;
    if !(frequency > T::zero()) {
        return Err(AnalysisError::EmptyBand {
            lo: 0.0,
            hi: nyquist.to_f64_lossy(),
        });
    }
    let segment_seconds = T::lit(params.rdt.periods) / frequency;
    let signature = rdt_extract(trace, sample_rate, T::lit(params.rdt.trigger_sigma), segment_seconds).ok();
    let (damping_ratio, confidence) = match &signature {
        Some(sig) => match fit_damping(sig, frequency) {
            Ok(z) if sig.is_confident() => (z, Confidence::Ok),
            Ok(z) => (z, Confidence::Low),
            Err(_) => (T::zero(), Confidence::Low),
        },
        None => (T::zero(), Confidence::Low),
    };
    Ok(ModeAnalysis {
        estimate: ModalEstimate {
            frequency,
            damping_ratio,
            shape,
            response_trace: trace.to_vec(),
            confidence,
        },
        psd,
        signature,
    })
}
