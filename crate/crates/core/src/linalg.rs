//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Matrices are `DMatrix<Complex64>`; the row-stacking `vec` map and its
//! inverse live here together with the handful of spectral helpers the rest of
//! the crate needs (positivity tests, inverse square roots of positive
//! operators, Gram-Schmidt residuals).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default tolerance for every zero/equality test in the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major data.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| real(rows[i][j]))
}

/// `|i⟩⟨j|` on an `n`-dimensional space (0-based).
pub fn ket_bra(i: usize, j: usize, n: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Computational basis projector `|i⟩⟨i|`.
pub fn projector(i: usize, n: usize) -> ComplexMatrix {
    ket_bra(i, i, n)
}

pub fn ensure_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dim(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Row-stacking: `vec(m)[i*n + j] = m[(i, j)]`.
pub fn vec(m: &ComplexMatrix) -> Result<ComplexVector> {
    let n = ensure_square(m, "vec argument")?;
    Ok(ComplexVector::from_fn(n * n, |k, _| m[(k / n, k % n)]))
}

/// Inverse of [`vec`] for a vector of length `n²`.
pub fn unvec(v: &ComplexVector, n: usize) -> Result<ComplexMatrix> {
    if v.len() != n * n {
        return Err(Error::dim(format!(
            "unvec: vector of length {} is not {n}²",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

/// Kronecker product with `a` as the major (slow) index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entry modulus, `‖m‖∞` in the entrywise sense.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// True iff `m` is Hermitian within `tol` and no eigenvalue is below `-tol`.
pub fn is_positive_semidefinite(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    ensure_square(m, "PSD test argument")?;
    Ok(psd_violation(m, tol)? <= tol)
}

/// Magnitude by which `m` fails to be PSD: the larger of its anti-Hermitian
/// deviation and the negated smallest eigenvalue. Zero or negative means PSD.
pub fn psd_violation(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    let n = ensure_square(m, "PSD test argument")?;
    if n == 0 {
        return Ok(0.0);
    }
    let asym = max_abs_diff(m, &m.adjoint());
    if asym > tol {
        return Ok(asym);
    }
    Ok((-hermitian_eigenvalues(m)[0]).max(0.0))
}

/// `m^{-1/2}` for a positive definite `m`; eigenvalues at or below `floor` are
/// dropped (pseudo-inverse square root).
pub fn inv_sqrt_psd(m: &ComplexMatrix, floor: f64) -> ComplexMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let d = ComplexMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        if l > floor {
            real(1.0 / l.sqrt())
        } else {
            ZERO
        }
    }));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `⟨a, b⟩ = a† b`.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> C64 {
    a.dotc(b)
}

/// Removes from `u` its projection onto `span(basis)`. The basis is assumed
/// orthonormal; returns the residual and its Euclidean norm.
pub fn gram_schmidt_residual(
    u: &ComplexVector,
    basis: &[ComplexVector],
) -> Result<(ComplexVector, f64)> {
    let mut b = u.clone();
    for (k, bi) in basis.iter().enumerate() {
        if bi.len() != u.len() {
            return Err(Error::dim(format!(
                "basis vector {k} has length {}, expected {}",
                bi.len(),
                u.len()
            )));
        }
        // Modified Gram-Schmidt: project the running residual.
        let coeff = inner(bi, &b);
        b.axpy(-coeff, bi, ONE);
    }
    let norm = b.norm();
    Ok((b, norm))
}
