use std::path::Path;

use ndarray::{Array2, Axis};

use super::PreprocessConfig;
use crate::record::{RecordError, ResponseRecord};

/// Reads a CSV record and its sidecar; `sample_rate` overrides the sidecar.
pub fn ingest_csv(path: &Path, sample_rate: Option<f64>) -> Result<ResponseRecord<f64>, RecordError> {
    ResponseRecord::read_csv(path, sample_rate)
}

/// A preprocessed record and the per-channel divisors applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub record: ResponseRecord<f64>,
    /// 1 for every channel unless standardization was on. Multiplying
    /// shape component `j` by `channel_scales[j]` returns it to input units.
    pub channel_scales: Vec<f64>,
}

/// Demean, block-average decimation, then optional unit-variance scaling.
///
/// Decimation by `f` averages each run of `f` samples (a length-`f` moving
/// average sampled every `f`-th step) and drops a trailing partial block.
/// Standardization divides by the population standard deviation; constant
/// channels are left unscaled.
pub fn preprocess(record: &ResponseRecord<f64>, config: &PreprocessConfig) -> Preprocessed {
    let mut x = record.samples.clone();
    if config.demean {
        demean(&mut x);
    }
    let factor = config.decimate_factor.max(1);
    let mut rate = record.sample_rate;
    if factor > 1 && x.nrows() / factor >= 2 {
        let rows = x.nrows() / factor;
        let mut out = Array2::zeros((rows, x.ncols()));
        for (k, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
            let block = x.slice(ndarray::s![k * factor..(k + 1) * factor, ..]);
            row.assign(&block.mean_axis(Axis(0)).expect("non-empty block"));
        }
        x = out;
        rate /= factor as f64;
        if config.demean {
            demean(&mut x);
        }
    }
    let mut scales = vec![1.0; x.ncols()];
    if config.standardize {
        let n = x.nrows() as f64;
        for (mut col, s) in x.axis_iter_mut(Axis(1)).zip(scales.iter_mut()) {
            let mean = col.sum() / n;
            let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            if sd > 0.0 {
                col.mapv_inplace(|v| v / sd);
                *s = sd;
            }
        }
    }
    Preprocessed {
        record: ResponseRecord {
            samples: x,
            sample_rate: rate,
            channel_labels: record.channel_labels.clone(),
            quantity: record.quantity,
            seed: record.seed,
        },
        channel_scales: scales,
    }
}

fn demean(x: &mut Array2<f64>) {
    let n = x.nrows() as f64;
    for mut col in x.axis_iter_mut(Axis(1)) {
        let mean = col.sum() / n;
        col.mapv_inplace(|v| v - mean);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::ResponseQuantity;
    use ndarray::array;

    fn rec(samples: Array2<f64>, fs: f64) -> ResponseRecord<f64> {
        let labels = (0..samples.ncols()).map(|i| format!("c{i}")).collect();
        ResponseRecord::new(samples, fs, labels, ResponseQuantity::Acceleration).unwrap()
    }

    #[test]
    fn demean_removes_offset() {
        let r = rec(array![[3.0, 1.0], [5.0, 1.0], [4.0, 1.0]], 10.0);
        let p = preprocess(&r, &PreprocessConfig::default());
        for col in p.record.samples.columns() {
            assert!(col.sum().abs() < 1e-12);
        }
        assert_eq!(p.channel_scales, vec![1.0, 1.0]);
    }

    #[test]
    fn decimation_halves_rate_and_length() {
        let x = Array2::from_shape_fn((101, 2), |(i, j)| (i * (j + 1)) as f64);
        let cfg = PreprocessConfig {
            demean: false,
            decimate_factor: 2,
            standardize: false,
        };
        let p = preprocess(&rec(x, 100.0), &cfg);
        assert_eq!(p.record.sample_rate, 50.0);
        assert_eq!(p.record.len(), 50);
        assert_eq!(p.record.samples[[0, 0]], 0.5);
        assert_eq!(p.record.samples[[3, 1]], 13.0);
    }

    #[test]
    fn standardized_channels_have_unit_variance() {
        let x = Array2::from_shape_fn((500, 3), |(i, j)| ((i as f64) * 0.37 * (j + 1) as f64).sin() * (j as f64 + 0.5) + 2.0);
        let cfg = PreprocessConfig {
            standardize: true,
            ..PreprocessConfig::default()
        };
        let p = preprocess(&rec(x, 10.0), &cfg);
        for col in p.record.samples.columns() {
            let var = col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64;
            assert!((var - 1.0).abs() <= 1e-12, "{var}");
        }
        assert!(p.channel_scales.iter().all(|s| *s > 0.0 && *s != 1.0));
    }
}
