//! Small dense linear solvers used by the approximation routines.
//!
//! Matrices are row-major slices. Square systems go through faer in `f64`;
//! least squares is a small Householder QR that zeroes dependent columns.

use faer::linalg::solvers::{DenseSolveCore, PartialPivLu, Solve};
use faer::{Mat, Side};

use crate::error::SolveError;
use crate::scalar::Scalar;

fn to_mat<T: Scalar>(a: &[T], n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| a[i * n + j].as_f64())
}

fn to_col<T: Scalar>(b: &[T]) -> Mat<f64> {
    Mat::from_fn(b.len(), 1, |i, _| b[i].as_f64())
}

/// LU factors with partial pivoting, rejecting numerically singular matrices.
fn factor_lu(a: &Mat<f64>) -> Result<PartialPivLu<f64>, SolveError> {
    let n = a.nrows();
    let scale = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0f64, |acc, (i, j)| acc.max(a[(i, j)].abs()));
    let lu = a.partial_piv_lu();
    let tiny = scale * f64::EPSILON * n.max(1) as f64;
    if (0..n).any(|i| !(lu.U()[(i, i)].abs() > tiny)) {
        return Err(SolveError::Singular { size: n });
    }
    Ok(lu)
}

/// Solves `a x = b` (row-major `n x n`) by LU with partial pivoting; `b` is
/// overwritten with the solution. Arithmetic is carried out in `f64`.
pub fn lu_solve<T: Scalar>(a: &[T], b: &mut [T]) -> Result<(), SolveError> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let lu = factor_lu(&to_mat(a, n))?;
    let x = lu.solve(to_col(b));
    b.iter_mut().enumerate().for_each(|(i, v)| *v = T::lit(x[(i, 0)]));
    Ok(())
}

/// Solves a symmetric positive definite system by Cholesky factorisation.
pub fn cholesky_solve<T: Scalar>(a: &[T], b: &mut [T]) -> Result<(), SolveError> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let llt = to_mat(a, n).llt(Side::Lower).map_err(|_| SolveError::Singular { size: n })?;
    let x = llt.solve(to_col(b));
    b.iter_mut().enumerate().for_each(|(i, v)| *v = T::lit(x[(i, 0)]));
    Ok(())
}

/// Inverse of a row-major `n x n` matrix.
pub fn invert<T: Scalar>(a: &[T], n: usize) -> Result<Vec<T>, SolveError> {
    debug_assert_eq!(a.len(), n * n);
    let inv = factor_lu(&to_mat(a, n))?.inverse();
    Ok((0..n * n).map(|k| T::lit(inv[(k / n, k % n)])).collect())
}

/// Weighted linear least squares `min Σ w_i (b_i - A_i x)^2` via Householder QR.
///
/// `rows` is `m x n` row-major, weights must be nonnegative. Returns the
/// coefficient vector. Column pivoting is not used; columns that are
/// numerically dependent on earlier ones get a zero coefficient.
pub fn weighted_lstsq<T: Scalar>(
    rows: &[T],
    ncols: usize,
    weights: &[T],
    rhs: &[T],
) -> Result<Vec<T>, SolveError> {
    let m = rhs.len();
    let n = ncols;
    debug_assert_eq!(rows.len(), m * n);
    if m < n {
        return Err(SolveError::Underdetermined { rows: m, cols: n });
    }
    // Column-major copy of sqrt(w) * A for cache-friendly reflections.
    let mut a = vec![T::zero(); m * n];
    let mut b = vec![T::zero(); m];
    for i in 0..m {
        let s = weights[i].max(T::zero()).sqrt();
        for j in 0..n {
            a[j * m + i] = s * rows[i * n + j];
        }
        b[i] = s * rhs[i];
    }
    let col_scale: Vec<T> = (0..n)
        .map(|j| a[j * m..(j + 1) * m].iter().fold(T::zero(), |acc, v| acc.max(v.abs())))
        .collect();

    let mut diag = vec![T::zero(); n];
    for k in 0..n {
        let (head, tail) = a.split_at_mut((k + 1) * m);
        let col = &mut head[k * m..];
        let norm = col[k..].iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
        if norm <= col_scale[k] * T::epsilon() * T::of_usize(m) || norm == T::zero() {
            diag[k] = T::zero();
            continue;
        }
        let alpha = if col[k] > T::zero() { -norm } else { norm };
        col[k] -= alpha;
        let vnorm2 = col[k..].iter().fold(T::zero(), |acc, v| acc + *v * *v);
        diag[k] = alpha;
        if vnorm2 == T::zero() {
            continue;
        }
        let v = &col[k..];
        for j in k + 1..n {
            let other = &mut tail[(j - k - 1) * m + k..(j - k) * m];
            let dot = v.iter().zip(other.iter()).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
            let f = (dot + dot) / vnorm2;
            for (o, vi) in other.iter_mut().zip(v) {
                *o -= f * *vi;
            }
        }
        let dot = v.iter().zip(&b[k..]).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
        let f = (dot + dot) / vnorm2;
        for (bi, vi) in b[k..].iter_mut().zip(v) {
            *bi -= f * *vi;
        }
    }

    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        if diag[k] == T::zero() {
            continue;
        }
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[j * m + k] * x[j];
        }
        x[k] = s / diag[k];
    }
    Ok(x)
}
