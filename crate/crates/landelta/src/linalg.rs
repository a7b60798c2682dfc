//! Thin wrappers over the dense linear algebra backend (faer): Hermitian
//! eigendecomposition, singular values, and LU solves for complex matrices.

use faer::prelude::*;
use faer::{Mat, Side};
use num_complex::Complex64;

/// Dense complex matrix type used throughout the crate.
pub type CMat = Mat<Complex64>;

/// Hermitian part (M + M^H)/2.
pub fn hermitize(m: &CMat) -> CMat {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}

/// Largest departure from Hermitian symmetry, max |M - M^H|.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is Hermitized
/// first to absorb quadrature-level asymmetry.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitize(m);
    let mut out = h
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("self-adjoint eigenvalue computation failed");
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigenpairs(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitize(m);
    let n = h.nrows();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigendecomposition failed");
    let s = evd.S();
    let u = evd.U();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| s[a].re.partial_cmp(&s[b].re).unwrap());
    let vals = idx.iter().map(|&i| s[i].re).collect();
    let vecs = Mat::from_fn(n, n, |r, c| u[(r, idx[c])]);
    (vals, vecs)
}

/// Number of eigenvalues of the Hermitian matrix that are <= threshold.
pub fn count_eigenvalues_below(m: &CMat, threshold: f64) -> usize {
    hermitian_eigenvalues(m)
        .into_iter()
        .filter(|&e| e <= threshold)
        .count()
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.svd().expect("SVD failed");
    let s = svd.S();
    let mut out: Vec<f64> = (0..m.nrows().min(m.ncols())).map(|i| s[i].re).collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general complex matrix.
pub fn general_eigenvalues(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.eigenvalues().expect("eigenvalue computation failed")
}

/// Solve A X = B by partial-pivoting LU.
pub fn solve(a: &CMat, b: &CMat) -> CMat {
    a.partial_piv_lu().solve(b)
}

/// Dense inverse via LU.
pub fn inverse(a: &CMat) -> CMat {
    let n = a.nrows();
    let id: CMat = Mat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    a.partial_piv_lu().solve(&id)
}

/// Condition estimate from the ratio of extreme singular values.
pub fn condition_number(a: &CMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Solve the real system A x = b (used by the capacity module).
pub fn solve_real(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}
