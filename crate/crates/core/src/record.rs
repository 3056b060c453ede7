//! Sampled multichannel response records and their CSV + JSON sidecar format.
//!
//! A record is stored as two files:
//!
//! * `name.csv`: a header row with the channel labels, then one row per sample;
//! * `name.json`: `{"sample_rate", "quantity", "units", "seed", "channels"}`.
//!
//! Values are written with the shortest representation that parses back to the
//! same bits, so export followed by ingest is lossless.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("no sample rate: sidecar {0} is missing and none was supplied")]
    MissingSampleRate(PathBuf),
    #[error("line {line}: {detail}")]
    RaggedRows { line: u64, detail: String },
    #[error("{0} contains no samples")]
    EmptyFile(PathBuf),
    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed sidecar {path}: {message}")]
    Sidecar { path: PathBuf, message: String },
}

impl RecordError {
    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseQuantity {
    #[default]
    Acceleration,
    Displacement,
}

impl ResponseQuantity {
    pub fn units(self) -> &'static str {
        match self {
            Self::Acceleration => "m/s^2",
            Self::Displacement => "m",
        }
    }
}

/// `N × m` samples (rows are time steps) with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRecord<T: Real> {
    pub samples: Array2<T>,
    pub sample_rate: T,
    pub channel_labels: Vec<String>,
    pub quantity: ResponseQuantity,
    /// Excitation seed, when the record was simulated.
    pub seed: Option<u64>,
}

impl<T: Real> ResponseRecord<T> {
    pub fn new(
        samples: Array2<T>,
        sample_rate: T,
        channel_labels: Vec<String>,
        quantity: ResponseQuantity,
    ) -> Result<Self, RecordError> {
        let rec = Self {
            samples,
            sample_rate,
            channel_labels,
            quantity,
            seed: None,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        if self.samples.nrows() < 2 {
            return Err(RecordError::Invalid(format!(
                "need at least 2 samples, got {}",
                self.samples.nrows()
            )));
        }
        if self.channel_labels.len() != self.samples.ncols() {
            return Err(RecordError::Invalid(format!(
                "{} labels for {} channels",
                self.channel_labels.len(),
                self.samples.ncols()
            )));
        }
        if !(self.sample_rate > T::zero()) || !self.sample_rate.is_finite() {
            return Err(RecordError::Invalid("sample_rate must be positive".into()));
        }
        if let Some(((row, col), _)) = self.samples.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(RecordError::Invalid(format!(
                "non-finite sample at row {row}, channel {col}"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn channels(&self) -> usize {
        self.samples.ncols()
    }

    /// Writes `path` (CSV) and its sidecar.
    pub fn write_csv(&self, path: &Path) -> Result<(), RecordError> {
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.channel_labels).map_err(|e| RecordError::io(path, e))?;
            for row in self.samples.rows() {
                w.write_record(row.iter().map(|v| v.to_string()))
                    .map_err(|e| RecordError::io(path, e))?;
            }
            w.flush().map_err(|e| RecordError::io(path, e))?;
        }
        atomic_write(path, &buf).map_err(|e| RecordError::io(path, e))?;
        let side = Sidecar {
            sample_rate: self.sample_rate.to_f64_lossy(),
            quantity: self.quantity,
            units: self.quantity.units().to_string(),
            seed: self.seed,
            channels: self.channel_labels.clone(),
        };
        let spath = sidecar_path(path);
        let json = serde_json::to_vec_pretty(&side).map_err(|e| RecordError::io(&spath, e))?;
        atomic_write(&spath, &json).map_err(|e| RecordError::io(&spath, e))
    }

    /// Reads a CSV record. The sample rate comes from `sample_rate` when given,
    /// otherwise from the sidecar next to `path`.
    pub fn read_csv(path: &Path, sample_rate: Option<T>) -> Result<Self, RecordError> {
        let text = fs::read(path).map_err(|e| RecordError::io(path, e))?;
        let spath = sidecar_path(path);
        let sidecar: Option<Sidecar> = if spath.exists() {
            let raw = fs::read(&spath).map_err(|e| RecordError::io(&spath, e))?;
            Some(serde_json::from_slice(&raw).map_err(|e| RecordError::Sidecar {
                path: spath.clone(),
                message: e.to_string(),
            })?)
        } else {
            None
        };
        let rate = match (sample_rate, &sidecar) {
            (Some(r), _) => r,
            (None, Some(s)) => T::lit(s.sample_rate),
            (None, None) => return Err(RecordError::MissingSampleRate(spath)),
        };

        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_slice());
        let headers = rdr.headers().map_err(|e| RecordError::io(path, e))?.clone();
        let labels: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
        if labels.is_empty() || (labels.len() == 1 && labels[0].is_empty()) {
            return Err(RecordError::EmptyFile(path.to_path_buf()));
        }
        let m = labels.len();
        let mut flat: Vec<T> = Vec::new();
        let mut rows = 0usize;
        for result in rdr.records() {
            let rec = result.map_err(|e| RecordError::RaggedRows {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                detail: e.to_string(),
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() != m {
                return Err(RecordError::RaggedRows {
                    line,
                    detail: format!("expected {m} fields, found {}", rec.len()),
                });
            }
            for field in rec.iter() {
                let v: T = field
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| RecordError::RaggedRows {
                        line,
                        detail: format!("non-numeric field {field:?}"),
                    })?;
                flat.push(v);
            }
            rows += 1;
        }
        if rows == 0 {
            return Err(RecordError::EmptyFile(path.to_path_buf()));
        }
        let samples = Array2::from_shape_vec((rows, m), flat)
            .map_err(|e| RecordError::Invalid(e.to_string()))?;
        let quantity = sidecar.as_ref().map(|s| s.quantity).unwrap_or_default();
        let mut rec = Self::new(samples, rate, labels, quantity)?;
        rec.seed = sidecar.and_then(|s| s.seed);
        Ok(rec)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    sample_rate: f64,
    #[serde(default)]
    quantity: ResponseQuantity,
    #[serde(default)]
    units: String,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    channels: Vec<String>,
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes to a temporary file in the target directory, then renames it into
/// place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample() -> ResponseRecord<f64> {
        ResponseRecord::new(
            array![[0.1, -2.5], [1.0 / 3.0, 4e-300], [-0.0, 7.0]],
            100.0,
            vec!["a".into(), "b".into()],
            ResponseQuantity::Acceleration,
        )
        .unwrap()
    }

    #[test]
    fn round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let rec = sample();
        rec.write_csv(&p).unwrap();
        let back = ResponseRecord::<f64>::read_csv(&p, None).unwrap();
        assert_eq!(back.samples.dim(), (3, 2));
        for (a, b) in back.samples.iter().zip(rec.samples.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.channel_labels, rec.channel_labels);
        assert_eq!(back.sample_rate, 100.0);
    }

    #[test]
    fn missing_sidecar_needs_rate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\n1,2\n3,4\n5,6\n").unwrap();
        assert!(matches!(
            ResponseRecord::<f64>::read_csv(&p, None),
            Err(RecordError::MissingSampleRate(_))
        ));
        let rec = ResponseRecord::<f64>::read_csv(&p, Some(50.0)).unwrap();
        assert_eq!(rec.samples.dim(), (3, 2));
    }

    #[test]
    fn nan_cell_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\n1,2\n3,NaN\n5,6\n").unwrap();
        match ResponseRecord::<f64>::read_csv(&p, Some(1.0)) {
            Err(RecordError::RaggedRows { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        fs::write(&p, "x,y\n1,2\n3\n").unwrap();
        assert!(matches!(
            ResponseRecord::<f64>::read_csv(&p, Some(1.0)),
            Err(RecordError::RaggedRows { line: 3, .. })
        ));
        fs::write(&p, "x,y\n").unwrap();
        assert!(matches!(
            ResponseRecord::<f64>::read_csv(&p, Some(1.0)),
            Err(RecordError::EmptyFile(_))
        ));
        fs::write(&p, "").unwrap();
        assert!(matches!(
            ResponseRecord::<f64>::read_csv(&p, Some(1.0)),
            Err(RecordError::EmptyFile(_))
        ));
    }

    #[test]
    fn validation() {
        assert!(ResponseRecord::new(array![[1.0]], 1.0, vec!["a".into()], ResponseQuantity::Acceleration).is_err());
        assert!(ResponseRecord::new(
            array![[1.0], [f64::INFINITY]],
            1.0,
            vec!["a".into()],
            ResponseQuantity::Acceleration
        )
        .is_err());
    }
}
