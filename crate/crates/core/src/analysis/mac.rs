use super::AnalysisError;
use crate::scalar::Real;

/// Modal assurance criterion `(aᵀb)² / ((aᵀa)(bᵀb))`, clamped to `[0, 1]`.
pub fn mac<T: Real>(shape_a: &[T], shape_b: &[T]) -> Result<T, AnalysisError> {
    if shape_a.len() != shape_b.len() {
        return Err(AnalysisError::InvalidInput(format!(
            "shape lengths differ: {} vs {}",
            shape_a.len(),
            shape_b.len()
        )));
    }
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).fold(T::zero(), |s, (&a, &b)| s + a * b);
    let aa = dot(shape_a, shape_a);
    let bb = dot(shape_b, shape_b);
    if aa == T::zero() || bb == T::zero() {
        return Err(AnalysisError::ZeroVector);
    }
    let ab = dot(shape_a, shape_b);
    let value = (ab * ab) / (aa * bb);
    Ok(value.max(T::zero()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_values() {
        let phi = [1.0, -0.5, 0.25];
        assert!((mac(&phi, &phi).unwrap() - 1.0f64).abs() < 1e-15);
        let scaled: Vec<f64> = phi.iter().map(|v| -3.7 * v).collect();
        assert!((mac(&phi, &scaled).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(mac(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn zero_vector() {
        assert!(matches!(mac(&[0.0, 0.0], &[1.0, 0.0]), Err(AnalysisError::ZeroVector)));
    }
}
