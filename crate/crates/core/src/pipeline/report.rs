use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{PipelineError, RunConfig};
use crate::analysis::{Confidence, ModePair};
use crate::network::write_trace_csv;
use crate::record::{atomic_write, ResponseRecord};
use crate::{LossBreakdown64, ModalEstimate64};

/// One line of the frequency / damping / MAC comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// Reference mode number (1-based) when matched, else the estimate's.
    pub mode: usize,
    pub estimate: usize,
    pub reference_frequency_hz: Option<f64>,
    pub frequency_hz: f64,
    pub reference_damping_percent: Option<f64>,
    pub damping_percent: f64,
    pub mac: Option<f64>,
    pub confidence: Confidence,
}

/// Files a run writes, all under `output_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactPaths {
    pub report: PathBuf,
    pub params: PathBuf,
    pub loss_trace: PathBuf,
    pub responses: Option<PathBuf>,
    pub shapes: Option<PathBuf>,
    pub psd: Vec<PathBuf>,
    pub rdt: Vec<PathBuf>,
}

impl ArtifactPaths {
    pub fn new(dir: &Path, modes: usize, rdt_modes: &[usize]) -> Self {
        let any = modes > 0;
        Self {
            report: dir.join("report.json"),
            params: dir.join("params.json"),
            loss_trace: dir.join("loss_trace.csv"),
            responses: any.then(|| dir.join("responses.csv")),
            shapes: any.then(|| dir.join("shapes.csv")),
            psd: (1..=modes).map(|k| dir.join(format!("psd_mode{k}.csv"))).collect(),
            rdt: rdt_modes
                .iter()
                .map(|k| dir.join(format!("rdt_mode{}.csv", k + 1)))
                .collect(),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        let mut v = vec![self.report.as_path(), self.params.as_path(), self.loss_trace.as_path()];
        v.extend(self.responses.as_deref());
        v.extend(self.shapes.as_deref());
        v.extend(self.psd.iter().map(PathBuf::as_path));
        v.extend(self.rdt.iter().map(PathBuf::as_path));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Ordered by frequency.
    pub modes: Vec<ModalEstimate64>,
    pub mac_table: Vec<ModePair<f64>>,
    pub table: Vec<TableRow>,
    /// Separation-layer columns kept as modal responses, one per mode.
    pub selected_columns: Vec<usize>,
    pub channel_labels: Vec<String>,
    pub channel_scales: Vec<f64>,
    /// After decimation (Hz).
    pub sample_rate: f64,
    /// Rows `[start, end)` the kept network was trained on.
    pub training_window: (usize, usize),
    /// Set when several windows were compared.
    pub window_purity: Option<f64>,
    pub analysis_samples: usize,
    pub final_loss: Option<LossBreakdown64>,
    pub loss_trace_path: PathBuf,
    pub responses_path: Option<PathBuf>,
    pub shapes_path: Option<PathBuf>,
    pub artifacts: ArtifactPaths,
    pub config_echo: RunConfig,
    pub seed: u64,
    pub thread_count: usize,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub loss_trace: Vec<LossBreakdown64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(format!("bad report: {e}")))
    }

    /// Fixed-width text rendering of [`RunReport::table`].
    pub fn render_table(&self) -> String {
        let opt = |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |v| format!("{v:.prec$}"));
        let mut out = format!(
            "{:>4} {:>10} {:>10} {:>9} {:>9} {:>7} {}\n",
            "mode", "f_ref(Hz)", "f_est(Hz)", "ζ_ref(%)", "ζ_est(%)", "MAC", "confidence"
        );
        for r in &self.table {
            out.push_str(&format!(
                "{:>4} {:>10} {:>10.4} {:>9} {:>9.4} {:>7} {:?}\n",
                r.mode,
                opt(r.reference_frequency_hz, 4),
                r.frequency_hz,
                opt(r.reference_damping_percent, 4),
                r.damping_percent,
                opt(r.mac, 4),
                r.confidence
            ));
        }
        out
    }
}

/// Writes the plot-ready series: loss trace, modal response traces, one PSD
/// per mode and the shape matrix (one row per mode).
pub fn emit_plot_series(report: &RunReport) -> Result<(), PipelineError> {
    let paths = &report.artifacts;
    write_trace_csv(&report.loss_trace, &paths.loss_trace).map_err(|e| PipelineError::output(&paths.loss_trace, e))?;
    if report.modes.is_empty() {
        return Ok(());
    }
    let n = report.modes[0].response_trace.len();
    let k = report.modes.len();
    let mut responses = Array2::zeros((n, k));
    for (j, m) in report.modes.iter().enumerate() {
        for (i, v) in m.response_trace.iter().enumerate() {
            responses[[i, j]] = *v;
        }
    }
    if let Some(p) = &paths.responses {
        let labels = (1..=k).map(|j| format!("mode{j}")).collect();
        let rec = ResponseRecord::new(responses, report.sample_rate, labels, Default::default())
            .map_err(|e| PipelineError::output(p, e))?;
        rec.write_csv(p).map_err(|e| PipelineError::output(p, e))?;
    }
    for (m, p) in report.modes.iter().zip(&paths.psd) {
        let psd = report
            .config_echo
            .analysis
            .welch
            .estimate(&m.response_trace, report.sample_rate)?;
        psd.write_csv(p).map_err(|e| PipelineError::output(p, e))?;
    }
    if let Some(p) = &paths.shapes {
        let mut out = String::from("mode");
        for l in &report.channel_labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (j, m) in report.modes.iter().enumerate() {
            out.push_str(&(j + 1).to_string());
            for v in &m.shape {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        atomic_write(p, out.as_bytes()).map_err(|e| PipelineError::output(p, e))?;
    }
    Ok(())
}
