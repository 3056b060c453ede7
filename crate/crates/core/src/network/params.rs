use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::scalar::Real;

/// Weights of the four-layer self-coding network. There are no biases.
///
/// * `w1`: `m×m`, input → layer 2 (`H = X·W1ᵀ`)
/// * `w2`: `m×n`, layer 2 → layer 3 (`Q = tanh(H·W2)`)
/// * `w3`: `n×m`, layer 3 → output (`X̂ = Q·W3`); row `i` estimates mode shape `i`
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T: Real> {
    pub w1: Array2<T>,
    pub w2: Array2<T>,
    pub w3: Array2<T>,
}

impl<T: Real> NetworkParams<T> {
    pub fn zeros(input_dim: usize, separation_dim: usize) -> Self {
        Self {
            w1: Array2::zeros((input_dim, input_dim)),
            w2: Array2::zeros((input_dim, separation_dim)),
            w3: Array2::zeros((separation_dim, input_dim)),
        }
    }

    /// Uniform(−1/√m, 1/√m) entries, drawn for `w1`, `w2`, `w3` in row-major order.
    pub fn random_init<R: Rng>(input_dim: usize, separation_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (input_dim as f64).sqrt();
        let dist = Uniform::new(-bound, bound).expect("non-empty init range");
        let mut draw = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| T::lit(dist.sample(rng)))
        };
        let w1 = draw(input_dim, input_dim);
        let w2 = draw(input_dim, separation_dim);
        let w3 = draw(separation_dim, input_dim);
        Self { w1, w2, w3 }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn separation_dim(&self) -> usize {
        self.w2.ncols()
    }

    pub fn check_shapes(&self) -> Result<(), NetworkError> {
        let m = self.w1.nrows();
        let n = self.w2.ncols();
        if self.w1.ncols() != m || self.w2.nrows() != m || self.w3.dim() != (n, m) {
            return Err(NetworkError::ShapeMismatch(format!(
                "inconsistent weights: w1 {:?}, w2 {:?}, w3 {:?}",
                self.w1.dim(),
                self.w2.dim(),
                self.w3.dim()
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.matrices().iter().all(|m| m.iter().all(|v| v.is_finite()))
    }

    pub fn matrices(&self) -> [&Array2<T>; 3] {
        [&self.w1, &self.w2, &self.w3]
    }

    pub fn matrices_mut(&mut self) -> [&mut Array2<T>; 3] {
        [&mut self.w1, &mut self.w2, &mut self.w3]
    }

    pub fn to_document(&self) -> ParamsDocument {
        let flat = |a: &Array2<T>| a.iter().map(|v| v.to_f64_lossy()).collect();
        ParamsDocument {
            input_dim: self.input_dim(),
            separation_dim: self.separation_dim(),
            w1: flat(&self.w1),
            w2: flat(&self.w2),
            w3: flat(&self.w3),
        }
    }

    pub fn from_document(doc: &ParamsDocument) -> Result<Self, NetworkError> {
        let (m, n) = (doc.input_dim, doc.separation_dim);
        let build = |name: &str, rows: usize, cols: usize, data: &[f64]| {
            Array2::from_shape_vec((rows, cols), data.iter().map(|&v| T::lit(v)).collect()).map_err(|_| {
                NetworkError::ShapeMismatch(format!(
                    "{name} has {} values, expected {rows}×{cols}",
                    data.len()
                ))
            })
        };
        let params = Self {
            w1: build("w1", m, m, &doc.w1)?,
            w2: build("w2", m, n, &doc.w2)?,
            w3: build("w3", n, m, &doc.w3)?,
        };
        if !params.is_finite() {
            return Err(NetworkError::ShapeMismatch("non-finite weight".into()));
        }
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("weights serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let doc: ParamsDocument =
            serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// On-disk form: dimension header plus row-major weight arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsDocument {
    pub input_dim: usize,
    pub separation_dim: usize,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
}
