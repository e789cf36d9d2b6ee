//! Small complex linear-algebra helpers.
//!
//! Matrices live in nalgebra containers; singular value and eigenvalue
//! computations are delegated to LAPACK through ndarray-linalg, whose results
//! stay accurate on the rank-deficient and defective matrices this crate
//! feeds it.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use ndarray_linalg::{EigVals, SVD};
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;
pub(crate) type CVec = DVector<Complex64>;

/// Thin SVD with singular values sorted descending. `u` is `m x k` and `v`
/// is `n x k` for `k = min(m, n)`.
pub(crate) struct SortedSvd {
    pub values: Vec<f64>,
    pub u: CMat,
    pub v: CMat,
}

pub(crate) fn svd(m: &CMat) -> SortedSvd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return SortedSvd { values: Vec::new(), u: CMat::zeros(rows, 0), v: CMat::zeros(cols, 0) };
    }
    let a = Array2::from_shape_fn((rows, cols), |(i, j)| m[(i, j)]);
    let (u, s, vt) = a.svd(true, true).expect("LAPACK SVD failed to converge");
    let (u, vt) = (u.expect("requested u"), vt.expect("requested vt"));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    SortedSvd {
        values: order.iter().map(|&i| s[i]).collect(),
        u: CMat::from_fn(rows, k, |r, c| u[(r, order[c])]),
        v: CMat::from_fn(cols, k, |r, c| vt[(order[c], r)].conj()),
    }
}

/// Eigenvalues of a square matrix (LAPACK `zgeev`), or `None` when the QR
/// iteration fails.
pub(crate) fn eigenvalues(m: &CMat) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let a = Array2::from_shape_fn((n, n), |(i, j)| m[(i, j)]);
    a.eigvals().ok().map(|v| v.to_vec())
}

/// Right-singular vectors spanning the numerical null space of a square
/// matrix: those with `σ <= tol · σ_max` (all of them for the zero matrix).
pub(crate) fn null_vectors(m: &CMat, tol: f64) -> Vec<CVec> {
    let s = svd(m);
    let smax = s.values.first().copied().unwrap_or(0.0);
    (0..s.values.len())
        .filter(|&i| smax == 0.0 || s.values[i] <= tol * smax)
        .map(|i| s.v.column(i).into_owned())
        .collect()
}

/// Left-singular vectors with `σ > tol · σ_max`.
pub(crate) fn range_vectors(m: &CMat, tol: f64) -> Vec<CVec> {
    let s = svd(m);
    let smax = s.values.first().copied().unwrap_or(0.0);
    (0..s.values.len())
        .filter(|&i| smax > 0.0 && s.values[i] > tol * smax)
        .map(|i| s.u.column(i).into_owned())
        .collect()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Vectors whose
/// residual falls below `tol` times their norm are dropped.
pub(crate) fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let n = r.norm();
        if n > tol * n0 {
            out.push(r / Complex64::new(n, 0.0));
        }
    }
    out
}

pub(crate) fn columns_to_matrix(rows: usize, cols: &[CVec]) -> CMat {
    CMat::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// Largest singular value of `(I - Q Q^*) X` for orthonormal columns `Q`.
pub(crate) fn residual_norm(q: &[CVec], x: &CMat) -> f64 {
    let mut r = x.clone();
    for _ in 0..2 {
        for qi in q {
            let coeffs = qi.adjoint() * &r;
            r -= qi * coeffs;
        }
    }
    if r.ncols() == 0 {
        return 0.0;
    }
    svd(&r).values.first().copied().unwrap_or(0.0)
}
