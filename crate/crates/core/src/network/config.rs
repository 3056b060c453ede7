use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::scalar::Real;

/// Contrast function applied to layer-2 outputs by the non-Gaussianity term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GFunction {
    /// `(1/a₁)·log₂ cosh(a₁ s)`, `1 ≤ a₁ ≤ 2`.
    G1 { a1: f64 },
    /// `−exp(−s²/2)`.
    G2,
    /// `s⁴/4`.
    G3,
}

impl Default for GFunction {
    fn default() -> Self {
        Self::G3
    }
}

impl GFunction {
    pub fn value<T: Real>(self, s: T) -> T {
        match self {
            Self::G1 { a1 } => {
                let a = T::lit(a1);
                (a * s).cosh().log2() / a
            }
            Self::G2 => -(-(s * s) / T::lit(2.0)).exp(),
            Self::G3 => s.powi(4) / T::lit(4.0),
        }
    }

    pub fn derivative<T: Real>(self, s: T) -> T {
        match self {
            Self::G1 { a1 } => (T::lit(a1) * s).tanh() / T::LN_2(),
            Self::G2 => s * (-(s * s) / T::lit(2.0)).exp(),
            Self::G3 => s.powi(3),
        }
    }
}

/// Architecture and training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    /// Number of input channels `m`.
    pub input_dim: usize,
    /// Number of separation neurons `n ≤ m`.
    pub separation_dim: usize,
    /// Weights of the layer-2 covariance, non-Gaussianity, `W⁽¹⁾` orthogonality
    /// and layer-3 covariance terms. The reconstruction term has unit weight.
    pub lambdas: [f64; 4],
    pub g_function: GFunction,
    pub learning_rate: f64,
    pub rms_decay: f64,
    pub rms_epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            input_dim: 4,
            separation_dim: 4,
            lambdas: [0.1; 4],
            g_function: GFunction::G3,
            learning_rate: 0.01,
            rms_decay: 0.9,
            rms_epsilon: 1e-8,
            batch_size: 128,
            epochs: 10_000,
            seed: 0,
        }
    }
}

impl NetworkConfig {
    pub fn new(input_dim: usize, separation_dim: usize) -> Self {
        Self {
            input_dim,
            separation_dim,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |msg: String| Err(NetworkError::InvalidConfig(msg));
        if self.input_dim == 0 || self.separation_dim == 0 {
            return bad("input_dim and separation_dim must be positive".into());
        }
        if self.separation_dim > self.input_dim {
            return bad(format!(
                "separation_dim {} exceeds input_dim {}",
                self.separation_dim, self.input_dim
            ));
        }
        if self.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return bad(format!("lambdas must lie in [0, 1], got {:?}", self.lambdas));
        }
        if let GFunction::G1 { a1 } = self.g_function {
            if !(a1 > 0.0) {
                return bad(format!("G1 needs a1 > 0, got {a1}"));
            }
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive".into());
        }
        if !(self.rms_decay > 0.0 && self.rms_decay < 1.0) {
            return bad("rms_decay must lie in (0, 1)".into());
        }
        if !(self.rms_epsilon > 0.0) {
            return bad("rms_epsilon must be positive".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_derivatives_match_differences() {
        for g in [GFunction::G1 { a1: 1.0 }, GFunction::G1 { a1: 2.0 }, GFunction::G2, GFunction::G3] {
            for s in [-1.7, -0.3, 0.2, 1.1, 2.5] {
                let h = 1e-6;
                let fd = (g.value(s + h) - g.value(s - h)) / (2.0 * h);
                let an: f64 = g.derivative(s);
                assert!((fd - an).abs() < 1e-7 * (1.0 + an.abs()), "{g:?} at {s}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(NetworkConfig::new(4, 4).validate().is_ok());
        assert!(NetworkConfig::new(3, 4).validate().is_err());
        let mut c = NetworkConfig::new(4, 4);
        c.lambdas[2] = 1.5;
        assert!(c.validate().is_err());
        let mut c = NetworkConfig::new(4, 4);
        c.rms_decay = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_uses_defaults_for_missing_fields() {
        let c: NetworkConfig = serde_json::from_str(r#"{"input_dim": 10, "separation_dim": 10, "g_function": {"kind": "g1", "a1": 1.0}}"#).unwrap();
        assert_eq!(c.batch_size, 128);
        assert_eq!(c.g_function, GFunction::G1 { a1: 1.0 });
    }
}
