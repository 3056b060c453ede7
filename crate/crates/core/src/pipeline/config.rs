use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::analysis::{RdtParams, SelectionCriteria, WelchParams};
use crate::network::NetworkConfig;
use crate::record::ResponseQuantity;

/// Built-in simulated data sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// The 4-DOF chain with mass-proportional damping, excited at every DOF.
    Benchmark4Dof,
    /// Six lightly damped modes below 1 Hz seen by ten sensors, with
    /// measurement noise.
    BridgeAnalog,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Simulate(Scenario),
    File(PathBuf),
}

impl InputSource {
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        match text.strip_prefix("simulate:") {
            Some("benchmark4dof") => Ok(Self::Simulate(Scenario::Benchmark4Dof)),
            Some("bridge-analog") => Ok(Self::Simulate(Scenario::BridgeAnalog)),
            Some(other) => Err(PipelineError::Config(format!(
                "unknown simulation {other:?}; expected benchmark4dof or bridge-analog"
            ))),
            None => Ok(Self::File(PathBuf::from(text))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub demean: bool,
    pub decimate_factor: usize,
    pub standardize: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            demean: true,
            decimate_factor: 1,
            standardize: false,
        }
    }
}

/// Settings for the `simulate:` inputs. Unset fields take the scenario's
/// defaults (100 Hz for the benchmark, 10 Hz and 5 % noise for the bridge
/// analog).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct SimulationConfig {
    pub sample_rate: Option<f64>,
    /// Record length; defaults to the end of the training window.
    pub samples: Option<usize>,
    /// Force standard deviation at every excited DOF (N).
    pub excitation_std: Option<f64>,
    /// Additive measurement noise as a fraction of each channel's RMS.
    pub noise_fraction: Option<f64>,
    pub output: ResponseQuantity,
    pub substeps: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct AnalysisConfig {
    pub welch: WelchParams,
    pub rdt: RdtParams,
    pub selection: SelectionCriteria,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// A CSV path, `simulate:benchmark4dof` or `simulate:bridge-analog`.
    pub input: String,
    /// Needed for CSV input without a sidecar.
    pub sample_rate: Option<f64>,
    pub simulation: SimulationConfig,
    pub preprocessing: PreprocessConfig,
    /// First row (after preprocessing) of the training window.
    pub training_start: usize,
    /// Length of the training window; runs to the end of the record when
    /// unset. Responses are always extracted from the whole record.
    pub training_samples: Option<usize>,
    /// Number of training windows to try. Window `k` starts at
    /// `training_start + k·restart_stride`; the network whose selected
    /// responses have the highest summed spectral purity is kept.
    pub restarts: usize,
    /// Offset between consecutive windows; defaults to the window length.
    pub restart_stride: Option<usize>,
    pub network: NetworkConfig,
    pub analysis: AnalysisConfig,
    /// ModalTruth JSON to match against. Simulated inputs fall back to
    /// their exact modes.
    pub reference: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: "simulate:benchmark4dof".into(),
            sample_rate: None,
            simulation: SimulationConfig::default(),
            preprocessing: PreprocessConfig::default(),
            training_start: 0,
            training_samples: None,
            restarts: 1,
            restart_stride: None,
            network: NetworkConfig::default(),
            analysis: AnalysisConfig::default(),
            reference: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }

    pub fn source(&self) -> Result<InputSource, PipelineError> {
        InputSource::parse(&self.input)
    }

    /// Sets every seed the run consumes.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.network.seed = seed;
        self.simulation.seed = seed;
        self
    }

    /// This config pinned to the `k`-th training window, with restarts off.
    pub fn window(&self, k: usize) -> Self {
        let len = self.training_samples.unwrap_or(0);
        let stride = self.restart_stride.unwrap_or(len);
        Self {
            training_start: self.training_start + k * stride,
            restarts: 1,
            restart_stride: None,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.source()?;
        self.network
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.preprocessing.decimate_factor == 0 {
            return Err(PipelineError::Config("decimate_factor must be at least 1".into()));
        }
        if let Some(n) = self.training_samples {
            if n < self.network.batch_size.max(2) {
                return Err(PipelineError::Config(format!(
                    "training_samples {n} is smaller than batch_size {}",
                    self.network.batch_size
                )));
            }
        }
        if self.restarts == 0 {
            return Err(PipelineError::Config("restarts must be at least 1".into()));
        }
        if self.restarts > 1 && self.training_samples.is_none() {
            return Err(PipelineError::Config("restarts need an explicit training_samples".into()));
        }
        if self.restart_stride == Some(0) {
            return Err(PipelineError::Config("restart_stride must be positive".into()));
        }
        let sim = &self.simulation;
        if sim.sample_rate.is_some_and(|f| !(f > 0.0)) {
            return Err(PipelineError::Config("simulation.sample_rate must be positive".into()));
        }
        if sim.excitation_std.is_some_and(|s| !(s >= 0.0)) || sim.noise_fraction.is_some_and(|s| !(s >= 0.0)) {
            return Err(PipelineError::Config(
                "excitation_std and noise_fraction must be non-negative".into(),
            ));
        }
        if sim.substeps == Some(0) {
            return Err(PipelineError::Config("simulation.substeps must be at least 1".into()));
        }
        if self.sample_rate.is_some_and(|f| !(f > 0.0)) {
            return Err(PipelineError::Config("sample_rate must be positive".into()));
        }
        if !(0.0..=0.9).contains(&self.analysis.welch.overlap_fraction)
            || !(0.0..=0.9).contains(&self.analysis.selection.welch.overlap_fraction)
        {
            return Err(PipelineError::Config("Welch overlap must lie in [0, 0.9]".into()));
        }
        if !(self.analysis.rdt.periods > 0.0) {
            return Err(PipelineError::Config("rdt.periods must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!(
            InputSource::parse("simulate:benchmark4dof").unwrap(),
            InputSource::Simulate(Scenario::Benchmark4Dof)
        );
        assert_eq!(
            InputSource::parse("data/a.csv").unwrap(),
            InputSource::File(PathBuf::from("data/a.csv"))
        );
        assert!(InputSource::parse("simulate:tower").is_err());
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = RunConfig::from_json(r#"{"input": "x.csv", "network": {"epochs": 5}}"#).unwrap();
        assert_eq!(cfg.network.epochs, 5);
        assert_eq!(cfg.network.batch_size, 128);
        assert!(cfg.preprocessing.demean);
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.preprocessing.decimate_factor = 0;
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
        let cfg = RunConfig::from_json(r#"{"network": {"separation_dim": 9}}"#).unwrap();
        assert!(cfg.validate().is_err());
        assert!(RunConfig::from_json("{ not json").is_err());
    }
}
