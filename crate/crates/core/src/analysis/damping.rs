use super::{AnalysisError, RdtSignature};
use crate::scalar::Real;

/// Damping ratio from the logarithmic decay of a free-vibration signature.
///
/// Local maxima of `|signature|` are refined with a three-point parabola and
/// `ln(peak)` is fitted by least squares against lag; the slope equals
/// `−ζω`. Taking the hint as the damped frequency `f_d`,
/// `ζ = −slope·√(1 − ζ²) / (2π f_d)`, solved by two fixed-point iterations.
/// Growing envelopes return 0.
pub fn fit_damping<T: Real>(signature: &RdtSignature<T>, frequency_hint: T) -> Result<T, AnalysisError> {
    if !(frequency_hint > T::zero()) {
        return Err(AnalysisError::InvalidInput("frequency hint must be positive".into()));
    }
    let amp = &signature.amplitude;
    let n = amp.len();
    if n < 3 || signature.lags.len() != n {
        return Err(AnalysisError::TooFewPeaks(0));
    }
    let dt = signature.lags[1] - signature.lags[0];
    let mut points: Vec<(T, T)> = Vec::new();
    for i in 1..n - 1 {
        let (a, b, c) = (amp[i - 1].abs(), amp[i].abs(), amp[i + 1].abs());
        if b >= a && b > c && b > T::zero() {
            let denom = a - T::lit(2.0) * b + c;
            let (offset, height) = if denom < T::zero() {
                let d = T::lit(0.5) * (a - c) / denom;
                (d, b - T::lit(0.25) * (a - c) * d)
            } else {
                (T::zero(), b)
            };
            points.push((signature.lags[i] + offset * dt, height.ln()));
        }
    }
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPeaks(points.len()));
    }
    let k = T::from_usize_lossy(points.len());
    let mean_t = points.iter().map(|p| p.0).sum::<T>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / k;
    let sxx = points.iter().map(|p| (p.0 - mean_t) * (p.0 - mean_t)).sum::<T>();
    let sxy = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum::<T>();
    let slope = sxy / sxx;
    let omega_d = T::lit(2.0) * T::PI() * frequency_hint;
    let mut zeta = (-slope / omega_d).max(T::zero());
    for _ in 0..2 {
        zeta = -slope * (T::one() - zeta * zeta).max(T::zero()).sqrt() / omega_d;
        zeta = zeta.max(T::zero());
    }
    Ok(zeta.min(T::lit(0.999_999)))
}
