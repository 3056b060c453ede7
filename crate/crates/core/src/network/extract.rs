use ndarray::{Array2, ArrayView2, Axis};

use super::{forward, NetworkError, NetworkParams};
use crate::linalg::{least_squares, LinalgError};
use crate::scalar::Real;

/// Layer-3 outputs for every sample (`N×n`); each column estimates one
/// modal response. Values lie in `(−1, 1)`.
pub fn extract_modal_responses<T: Real>(
    params: &NetworkParams<T>,
    data: ArrayView2<T>,
) -> Result<Array2<T>, NetworkError> {
    super::forward::warn_if_uncentered(&data);
    Ok(forward(params, data)?.q)
}

/// Scales each column to unit max-abs. All-zero columns are left as is.
pub fn normalize_columns_max_abs<T: Real>(a: &Array2<T>) -> Array2<T> {
    let mut out = a.clone();
    for mut col in out.axis_iter_mut(Axis(1)) {
        let peak = col.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if peak > T::zero() {
            col.mapv_inplace(|v| v / peak);
        }
    }
    out
}

/// Scales each row so its largest-magnitude entry (first on ties) is `+1`.
pub fn normalize_shape_rows<T: Real>(shapes: &Array2<T>) -> Array2<T> {
    let mut out = shapes.clone();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let mut arg = 0;
        for (i, v) in row.iter().enumerate() {
            if v.abs() > row[arg].abs() {
                arg = i;
            }
        }
        let pivot = row[arg];
        if pivot != T::zero() {
            row.mapv_inplace(|v| v / pivot);
        }
    }
    out
}

/// Mode shapes from the layer-3 → output weights, one normalized row per
/// separation neuron.
pub fn extract_mode_shapes<T: Real>(params: &NetworkParams<T>) -> Array2<T> {
    normalize_shape_rows(&params.w3)
}

const RANK_TOL: f64 = 1e-10;

/// Re-estimates shapes for a chosen subset of modal responses (`N×k`) by
/// minimizing the reconstruction error `‖X − Q·W‖²` over `W` alone.
///
/// This is the closed-form limit of training a fresh output layer on the
/// reconstruction loss with the responses held fixed.
pub fn refit_shapes<T: Real>(
    selected_responses: ArrayView2<T>,
    data: ArrayView2<T>,
) -> Result<Array2<T>, NetworkError> {
    if selected_responses.nrows() != data.nrows() {
        return Err(NetworkError::ShapeMismatch(format!(
            "{} response samples for {} data samples",
            selected_responses.nrows(),
            data.nrows()
        )));
    }
    let w = least_squares(&selected_responses, &data, T::lit(RANK_TOL)).map_err(|e| match e {
        LinalgError::RankDeficient { .. } => NetworkError::RankDeficient,
        other => NetworkError::ShapeMismatch(other.to_string()),
    })?;
    Ok(normalize_shape_rows(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn zero_data_gives_zero_responses() {
        let p = NetworkParams {
            w1: array![[1.0, 0.3], [0.2, 1.0]],
            w2: array![[1.0, 0.0], [0.0, 1.0]],
            w3: array![[1.0, 0.0], [0.0, 1.0]],
        };
        let q = extract_modal_responses(&p, Array2::zeros((5, 2)).view()).unwrap();
        assert!(q.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn shape_rows_have_unit_positive_peak() {
        let w3 = array![[0.2, -0.8, 0.4], [3.0, 1.0, -3.0], [0.0, 0.0, 0.0]];
        let p = NetworkParams {
            w1: Array2::eye(3),
            w2: Array2::zeros((3, 3)),
            w3,
        };
        let s = extract_mode_shapes(&p);
        assert_eq!(s.row(0).to_vec(), vec![-0.25, 1.0, -0.5]);
        assert_eq!(s.row(1).to_vec(), vec![1.0, 1.0 / 3.0, -1.0]);
        assert!(s.row(2).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_response_residual_is_orthogonal() {
        let q = array![[1.0], [2.0], [-1.0], [0.5]];
        let x = array![[1.1, 0.3], [1.9, 0.7], [-1.2, -0.1], [0.4, 0.2]];
        let raw = least_squares(&q.view(), &x.view(), 1e-10).unwrap();
        let resid = &x - &q.dot(&raw);
        for j in 0..2 {
            assert_abs_diff_eq!(resid.column(j).dot(&q.column(0)), 0.0, epsilon = 1e-12);
        }
        let shaped = refit_shapes(q.view(), x.view()).unwrap();
        assert_eq!(shaped.dim(), (1, 2));
        assert_abs_diff_eq!(shaped[[0, 1]], raw[[0, 1]] / raw[[0, 0]], epsilon = 1e-12);
    }

    #[test]
    fn collinear_responses_are_rank_deficient() {
        let q = array![[1.0, 2.0], [2.0, 4.0], [-1.0, -2.0]];
        let x = array![[1.0], [2.0], [3.0]];
        assert!(matches!(refit_shapes(q.view(), x.view()), Err(NetworkError::RankDeficient)));
    }
}
