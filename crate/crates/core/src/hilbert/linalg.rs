//! Dense linear-algebra capabilities shared by the rest of the crate.
//! Eigen- and LU decompositions come from `nalgebra`; the sparse side lives in
//! [`super::sparse`] and [`super::banded`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `(m + m^dag) / 2` with entries below `eps^2` of the largest one set to
/// zero. Such entries do not move the spectrum, but products of them underflow
/// inside the tridiagonal reduction and turn it into NaN.
fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    let floor = m.iter().map(|z| z.norm()).fold(0.0, f64::max) * f64::EPSILON * f64::EPSILON;
    let mut h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.iter_mut().filter(|z| z.norm() < floor).for_each(|z| *z = C64::new(0.0, 0.0));
    h
}

/// Hermitian eigendecomposition, eigenvalues ascending. Only the Hermitian
/// part of `m` is used.
pub fn eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigvalsh(m: &DMatrix<C64>) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a general (non-symmetric) real matrix.
pub fn eigvals_general(m: &DMatrix<f64>) -> Vec<C64> {
    m.complex_eigenvalues().iter().copied().collect()
}

pub fn lu_solve(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    a.clone().lu().solve(b).ok_or_else(|| Error::Singular("dense LU solve failed".into()))
}

/// Sum of singular values of a Hermitian matrix (sum of |eigenvalues|).
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    eigvalsh(m).iter().map(|v| v.abs()).sum()
}

pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute row sum.
pub fn norm_inf(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|r| m.row(r).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn trace(m: &DMatrix<C64>) -> C64 {
    m.diagonal().iter().sum()
}
