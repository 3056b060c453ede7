//! Small dense linear algebra kernels.
//!
//! The systems handled by this crate are tiny (a handful of DOFs, at most a
//! few dozen channels), so straightforward textbook kernels are used. Every
//! routine is deterministic and single-threaded.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is singular to working precision (pivot {index})")]
    Singular { index: usize },
    #[error("columns are linearly dependent (|r_{index}{index}| = {value:e})")]
    RankDeficient { index: usize, value: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(a: &ArrayView2<T>) -> T {
    a.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
}

/// Symmetry check relative to the largest entry of `a`.
pub fn is_symmetric<T: Real>(a: &ArrayView2<T>, rel_tol: T) -> bool {
    let (r, c) = a.dim();
    if r != c {
        return false;
    }
    let scale = max_abs(a).max(T::min_positive_value());
    for i in 0..r {
        for j in (i + 1)..c {
            if (a[[i, j]] - a[[j, i]]).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

/// Lower Cholesky factor `L` with `a = L Lᵀ`.
pub fn cholesky<T: Real>(a: &ArrayView2<T>) -> Result<Array2<T>, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::ShapeMismatch(format!(
            "cholesky needs a square matrix, got {:?}",
            a.dim()
        )));
    }
    let mut l = Array2::<T>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite {
                index: j,
                pivot: d.to_f64_lossy(),
            });
        }
        let djj = d.sqrt();
        l[[j, j]] = djj;
        for i in (j + 1)..n {
            let mut v = a[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = v / djj;
        }
    }
    Ok(l)
}

/// Solves `L Y = B` for lower-triangular `L`.
pub fn solve_lower<T: Real>(l: &ArrayView2<T>, b: &ArrayView2<T>) -> Array2<T> {
    let n = l.nrows();
    let mut y = b.to_owned();
    for col in 0..y.ncols() {
        for i in 0..n {
            let mut v = y[[i, col]];
            for k in 0..i {
                v -= l[[i, k]] * y[[k, col]];
            }
            y[[i, col]] = v / l[[i, i]];
        }
    }
    y
}

/// Solves `Lᵀ Y = B` for lower-triangular `L`.
pub fn solve_lower_transpose<T: Real>(l: &ArrayView2<T>, b: &ArrayView2<T>) -> Array2<T> {
    let n = l.nrows();
    let mut y = b.to_owned();
    for col in 0..y.ncols() {
        for i in (0..n).rev() {
            let mut v = y[[i, col]];
            for k in (i + 1)..n {
                v -= l[[k, i]] * y[[k, col]];
            }
            y[[i, col]] = v / l[[i, i]];
        }
    }
    y
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Array2<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Pivots smaller than `rel_tol · max|a|` are treated as singular.
    pub fn factor(a: &ArrayView2<T>, rel_tol: T) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::ShapeMismatch(format!(
                "LU needs a square matrix, got {:?}",
                a.dim()
            )));
        }
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = rel_tol * max_abs(a);
        for k in 0..n {
            let mut p = k;
            let mut best = lu[[k, k]].abs();
            for i in (k + 1)..n {
                if lu[[i, k]].abs() > best {
                    best = lu[[i, k]].abs();
                    p = i;
                }
            }
            if !(best > floor) || best == T::zero() {
                return Err(LinalgError::Singular { index: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
                perm.swap(k, p);
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let f = lu[[i, k]] / pivot;
                lu[[i, k]] = f;
                for j in (k + 1)..n {
                    let v = lu[[k, j]];
                    lu[[i, j]] -= f * v;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &ArrayView1<T>) -> Array1<T> {
        let n = self.lu.nrows();
        let mut y = Array1::<T>::zeros(n);
        for i in 0..n {
            let mut v = b[self.perm[i]];
            for k in 0..i {
                v -= self.lu[[i, k]] * y[k];
            }
            y[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for k in (i + 1)..n {
                v -= self.lu[[i, k]] * y[k];
            }
            y[i] = v / self.lu[[i, i]];
        }
        y
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. Sweeps stop once the off-diagonal Frobenius norm
/// falls below `tol` times the Frobenius norm of `a`.
pub fn symmetric_eigen<T: Real>(a: &ArrayView2<T>, tol: T) -> (Array1<T>, Array2<T>) {
    let n = a.nrows();
    let mut m = a.to_owned();
    let mut v = Array2::<T>::eye(n);
    let total = m.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[[i, j]] * m[[i, j]];
                }
            }
        }
        if off.sqrt() <= tol * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (two * apq);
                let t = sign_nonzero(theta) / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap_or(std::cmp::Ordering::Equal));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    (values, vectors)
}

fn sign_nonzero<T: Real>(v: T) -> T {
    if v < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

/// Least-squares solution of `A X ≈ B` by Householder QR.
///
/// `A` is `N×k` with `N ≥ k`. Fails with [`LinalgError::RankDeficient`] when a
/// diagonal entry of `R` drops below `rank_tol` times the largest one.
pub fn least_squares<T: Real>(
    a: &ArrayView2<T>,
    b: &ArrayView2<T>,
    rank_tol: T,
) -> Result<Array2<T>, LinalgError> {
    let (rows, k) = a.dim();
    if b.nrows() != rows {
        return Err(LinalgError::ShapeMismatch(format!(
            "least squares: A has {rows} rows, B has {}",
            b.nrows()
        )));
    }
    if rows < k {
        return Err(LinalgError::RankDeficient { index: rows, value: 0.0 });
    }
    let mut r = a.to_owned();
    let mut qtb = b.to_owned();
    for j in 0..k {
        let norm = r
            .slice(s![j.., j])
            .iter()
            .fold(T::zero(), |acc, &x| acc + x * x)
            .sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[[j, j]] > T::zero() { -norm } else { norm };
        let mut v = r.slice(s![j.., j]).to_owned();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for col in j..k {
            let dot = v
                .iter()
                .zip(r.slice(s![j.., col]).iter())
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            let f = two * dot / vnorm2;
            for (i, &vi) in v.iter().enumerate() {
                r[[j + i, col]] -= f * vi;
            }
        }
        for col in 0..qtb.ncols() {
            let dot = v
                .iter()
                .zip(qtb.slice(s![j.., col]).iter())
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            let f = two * dot / vnorm2;
            for (i, &vi) in v.iter().enumerate() {
                qtb[[j + i, col]] -= f * vi;
            }
        }
    }
    let diag_max = (0..k).fold(T::zero(), |m, j| m.max(r[[j, j]].abs()));
    for j in 0..k {
        let d = r[[j, j]].abs();
        if !(d > rank_tol * diag_max) {
            return Err(LinalgError::RankDeficient {
                index: j,
                value: d.to_f64_lossy(),
            });
        }
    }
    let mut x = Array2::<T>::zeros((k, b.ncols()));
    for col in 0..b.ncols() {
        for i in (0..k).rev() {
            let mut v = qtb[[i, col]];
            for jj in (i + 1)..k {
                v -= r[[i, jj]] * x[[jj, col]];
            }
            x[[i, col]] = v / r[[i, i]];
        }
    }
    Ok(x)
}

/// Induced 1-norm (maximum absolute column sum) and the first column that
/// attains it.
pub fn induced_one_norm<T: Real>(a: &ArrayView2<T>) -> (T, usize) {
    let mut best = T::neg_infinity();
    let mut arg = 0;
    for (j, col) in a.axis_iter(Axis(1)).enumerate() {
        let s = col.iter().fold(T::zero(), |acc, &v| acc + v.abs());
        if s > best {
            best = s;
            arg = j;
        }
    }
    if a.ncols() == 0 {
        (T::zero(), 0)
    } else {
        (best, arg)
    }
}

/// Subtracts the column means.
pub fn center_columns<T: Real>(a: &ArrayView2<T>) -> Array2<T> {
    let rows = T::from_usize_lossy(a.nrows().max(1));
    let mut out = a.to_owned();
    for mut col in out.axis_iter_mut(Axis(1)) {
        let mean = col.iter().fold(T::zero(), |s, &v| s + v) / rows;
        col.mapv_inplace(|v| v - mean);
    }
    out
}

/// Unbiased sample covariance of the columns of `a` (rows are observations).
/// Also returns the centered data, which gradient code reuses.
pub fn sample_covariance<T: Real>(a: &ArrayView2<T>) -> (Array2<T>, Array2<T>) {
    let centered = center_columns(a);
    let denom = T::from_usize_lossy(a.nrows().saturating_sub(1).max(1));
    let cov = centered.t().dot(&centered) / denom;
    (cov, centered)
}
