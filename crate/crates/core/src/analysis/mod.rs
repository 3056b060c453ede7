//! Modal parameters from separated responses: PSD peak picking, random
//! decrement with envelope damping fits, MAC scoring, mode matching and
//! spurious-mode rejection.

mod damping;
mod estimate;
mod mac;
mod matching;
mod peak;
mod psd;
mod rdt;
mod select;

pub use damping::fit_damping;
pub use estimate::{analyze_response, AnalysisParams, Confidence, ModalEstimate, ModeAnalysis};
pub use mac::mac;
pub use matching::{match_modes, match_shapes, ModePair};
pub use peak::{locate_peak, pick_peak, Peak};
pub use psd::{default_segment_length, welch_psd, PsdEstimate, WelchParams, Window};
pub use rdt::{rdt_extract, RdtParams, RdtSignature, MIN_CONFIDENT_SEGMENTS};
pub use select::{column_peaks, select_modes, spectral_purity, ColumnPeak, SelectionCriteria};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("signal too short: need {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("no spectral peak in band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("only {0} trigger crossings found")]
    NoTriggers(usize),
    #[error("only {0} envelope peaks, need 3")]
    TooFewPeaks(usize),
    #[error("zero-length shape vector")]
    ZeroVector,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
