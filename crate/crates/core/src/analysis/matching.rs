use serde::{Deserialize, Serialize};

use super::{mac, ModalEstimate};
use crate::dynamics::ModalTruth;
use crate::scalar::Real;

/// An estimate paired with a reference mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModePair<T: Real> {
    pub estimate: usize,
    pub reference: usize,
    pub mac: T,
    /// `f_estimate − f_reference` (Hz).
    pub frequency_error: T,
}

/// Greedy pairing by descending MAC, ties broken by smaller `|Δf|`. Each
/// estimate and each reference mode is used at most once. Pairs come back
/// ordered by reference mode.
pub fn match_modes<T: Real>(estimates: &[ModalEstimate<T>], reference: &ModalTruth<T>) -> Vec<ModePair<T>> {
    let shapes: Vec<Vec<T>> = estimates.iter().map(|e| e.shape.clone()).collect();
    let freqs: Vec<T> = estimates.iter().map(|e| e.frequency).collect();
    let ref_shapes: Vec<Vec<T>> = (0..reference.mode_count()).map(|i| reference.shape(i).to_vec()).collect();
    match_shapes(&shapes, &freqs, &ref_shapes, &reference.frequencies)
}

/// [`match_modes`] on raw shape vectors and frequencies.
pub fn match_shapes<T: Real>(
    shapes: &[Vec<T>],
    frequencies: &[T],
    ref_shapes: &[Vec<T>],
    ref_frequencies: &[T],
) -> Vec<ModePair<T>> {
    let mut candidates = Vec::new();
    for (i, s) in shapes.iter().enumerate() {
        for (j, r) in ref_shapes.iter().enumerate() {
            let m = mac(s, r).unwrap_or(T::zero());
            let df = frequencies[i] - ref_frequencies[j];
            candidates.push(ModePair {
                estimate: i,
                reference: j,
                mac: m,
                frequency_error: df,
            });
        }
    }
    candidates.sort_by(|a, b| {
        b.mac
            .partial_cmp(&a.mac)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.frequency_error
                    .abs()
                    .partial_cmp(&b.frequency_error.abs())
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(a.estimate.cmp(&b.estimate))
            .then(a.reference.cmp(&b.reference))
    });
    let mut used_est = vec![false; shapes.len()];
    let mut used_ref = vec![false; ref_shapes.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        if !used_est[c.estimate] && !used_ref[c.reference] {
            used_est[c.estimate] = true;
            used_ref[c.reference] = true;
            pairs.push(c);
        }
    }
    pairs.sort_by_key(|p| p.reference);
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Confidence;
    use crate::dynamics::{benchmark_4dof, eigen_modes};

    fn estimate(shape: Vec<f64>, frequency: f64) -> ModalEstimate<f64> {
        ModalEstimate {
            frequency,
            damping_ratio: 0.0,
            shape,
            response_trace: vec![],
            confidence: Confidence::Ok,
        }
    }

    #[test]
    fn permuted_reference_is_recovered() {
        let truth = eigen_modes(&benchmark_4dof::<f64>()).unwrap();
        let perm = [2, 0, 3, 1];
        let est: Vec<_> = perm
            .iter()
            .map(|&j| estimate(truth.shape(j).to_vec(), truth.frequencies[j]))
            .collect();
        let pairs = match_modes(&est, &truth);
        assert_eq!(pairs.len(), 4);
        for p in pairs {
            assert_eq!(perm[p.estimate], p.reference);
            assert!((p.mac - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poor_estimate_still_pairs() {
        let truth = eigen_modes(&benchmark_4dof::<f64>()).unwrap();
        let pairs = match_modes(&[estimate(vec![0.0, 0.0, 0.0, 0.0], 1.0)], &truth);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].mac, 0.0);
        // All MACs tie at zero, so the smallest |Δf| wins: mode 1 at 2.58 Hz.
        assert_eq!(pairs[0].reference, 0);
    }
}
