//! Composite Hilbert spaces: layouts, operators, density matrices, and the
//! elementary operators (Fock ladder, qubit Paulis, displacement).

pub mod banded;
pub mod linalg;
pub mod sparse;

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
pub use sparse::CsrMatrix;

/// Operators above this dimension are stored sparse.
pub const DENSE_MAX_DIM: usize = 512;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub const QUBIT: &str = "qubit";
pub const CAVITY: &str = "cavity";
pub const ATOM: &str = "atom";

/// Ordered tensor factors with unique labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<(String, usize)>,
}

impl SpaceLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> = factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidDimension("layout needs at least one factor".into()));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidDimension(format!("factor `{label}` has dimension 0")));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::LayoutMismatch(format!("duplicate factor label `{label}`")));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("single-factor layout")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors.iter().position(|(l, _)| l == label).ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].1)
    }

    /// Concatenation; colliding labels are disambiguated with a `#k` suffix.
    pub fn concat(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (label, dim) in &other.factors {
            let mut l = label.clone();
            let mut k = factors.len();
            while factors.iter().any(|(x, _)| *x == l) {
                l = format!("{label}#{k}");
                k += 1;
            }
            factors.push((l, *dim));
        }
        Self { factors }
    }

    /// Splits a flat index into per-factor indices (row-major, first factor
    /// most significant).
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, (_, d)) in self.factors.iter().enumerate().rev() {
            out[k] = idx % d;
            idx /= d;
        }
        out
    }

    pub fn flatten(&self, parts: &[usize]) -> usize {
        parts.iter().zip(&self.factors).fold(0, |acc, (&i, (_, d))| acc * d + i)
    }

    /// Stride of a factor in the flat index and the product of dimensions
    /// before it: `(outer, dim, inner)`.
    fn split(&self, pos: usize) -> (usize, usize, usize) {
        let outer = self.factors[..pos].iter().map(|(_, d)| d).product();
        let inner = self.factors[pos + 1..].iter().map(|(_, d)| d).product();
        (outer, self.factors[pos].1, inner)
    }
}

#[derive(Clone, Debug)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix),
}

/// A square operator on a [`SpaceLayout`]. Immutable once built.
#[derive(Clone, Debug)]
pub struct Operator {
    layout: SpaceLayout,
    storage: Storage,
}

impl Operator {
    pub fn from_dense(layout: SpaceLayout, m: DMatrix<C64>) -> Result<Self> {
        check_square(&layout, m.nrows(), m.ncols())?;
        Ok(Self { layout, storage: Storage::Dense(m) })
    }

    pub fn from_csr(layout: SpaceLayout, m: CsrMatrix) -> Result<Self> {
        check_square(&layout, m.nrows(), m.ncols())?;
        Ok(Self { layout, storage: Storage::Sparse(m) })
    }

    /// Picks dense or sparse storage from the dimension.
    pub fn from_csr_auto(layout: SpaceLayout, m: CsrMatrix) -> Result<Self> {
        if m.nrows() <= DENSE_MAX_DIM {
            Self::from_dense(layout, m.to_dense())
        } else {
            Self::from_csr(layout, m)
        }
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self::from_csr_auto(layout, CsrMatrix::identity(n)).expect("identity shape")
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self::from_csr_auto(layout, CsrMatrix::zeros(n, n)).expect("zero shape")
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        match &self.storage {
            Storage::Dense(m) => CsrMatrix::from_dense(m, 0.0),
            Storage::Sparse(m) => m.clone(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(m) => m.get(r, c),
        }
    }

    fn with_storage(&self, storage: Storage) -> Self {
        Self { layout: self.layout.clone(), storage }
    }

    pub fn adjoint(&self) -> Self {
        self.with_storage(match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        self.with_storage(match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * s),
            Storage::Sparse(m) => Storage::Sparse(m.scale(s)),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(self.with_storage(match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.add(b)),
            _ => Storage::Dense(self.to_dense() + other.to_dense()),
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_layout(other)?;
        Ok(self.with_storage(match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            (Storage::Sparse(a), Storage::Dense(b)) => Storage::Dense(a.mul_dense(b)),
            (Storage::Dense(a), Storage::Sparse(b)) => Storage::Dense(b.dense_mul(a)),
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a * b),
        }))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => linalg::norm_inf(m),
            Storage::Sparse(m) => m.norm_inf(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        let diff = self.sub(&self.adjoint()).expect("same layout");
        diff.norm_inf() <= 1e-12 * self.norm_inf()
    }

    /// Embeds a single-factor operator into `layout` at `label`, identity on
    /// the other factors.
    pub fn embed(&self, layout: &SpaceLayout, label: &str) -> Result<Self> {
        let pos = layout.position(label)?;
        let (outer, dim, inner) = layout.split(pos);
        if dim != self.dim() {
            return Err(Error::LayoutMismatch(format!(
                "operator of dimension {} cannot sit on factor `{label}` of dimension {dim}",
                self.dim()
            )));
        }
        let m = CsrMatrix::identity(outer).kron(&self.to_csr()).kron(&CsrMatrix::identity(inner));
        Self::from_csr_auto(layout.clone(), m)
    }

    /// Matrix exponential through the Hermitian eigendecomposition of `i*self`;
    /// valid for anti-Hermitian operators.
    pub fn expm_antihermitian(&self) -> Result<Self> {
        let h = self.to_dense() * I;
        let (vals, vecs) = linalg::eigh(&h);
        let phases = DVector::from_iterator(vals.len(), vals.iter().map(|&v| (-I * v).exp()));
        let u = &vecs * DMatrix::from_diagonal(&phases) * vecs.adjoint();
        Self::from_dense(self.layout.clone(), u)
    }

    fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", self.layout, other.layout)));
        }
        Ok(())
    }
}

fn check_square(layout: &SpaceLayout, r: usize, c: usize) -> Result<()> {
    let n = layout.total_dim();
    if r != n || c != n {
        return Err(Error::InvalidDimension(format!("{r}x{c} matrix on a layout of dimension {n}")));
    }
    Ok(())
}

/// Kronecker product in the given factor order.
pub fn tensor(ops: &[&Operator]) -> Operator {
    assert!(!ops.is_empty(), "tensor of an empty list");
    let mut layout = ops[0].layout.clone();
    let mut m = ops[0].to_csr();
    for op in &ops[1..] {
        layout = layout.concat(&op.layout);
        m = m.kron(&op.to_csr());
    }
    Operator::from_csr_auto(layout, m).expect("kron shape")
}

/// Annihilation and number operators on `{|0>, ..., |n_max-1>}`.
pub fn fock_ops(n_max: usize) -> Result<(Operator, Operator)> {
    if n_max < 2 {
        return Err(Error::InvalidDimension(format!("Fock cutoff {n_max} < 2")));
    }
    let layout = SpaceLayout::single(CAVITY, n_max);
    let a = CsrMatrix::from_triplets(
        n_max,
        n_max,
        (1..n_max).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))).collect(),
    );
    let num = CsrMatrix::from_diagonal(&(0..n_max).map(|n| C64::new(n as f64, 0.0)).collect::<Vec<_>>());
    Ok((Operator::from_csr_auto(layout.clone(), a)?, Operator::from_csr_auto(layout, num)?))
}

/// Qubit operators on `{|g>, |e>}` (index 0 = g): `(sigma_z, sigma_plus)` with
/// `sigma_z = |e><e| - |g><g|`, `sigma_plus = |e><g|`.
pub fn qubit_ops() -> (Operator, Operator) {
    let layout = SpaceLayout::single(QUBIT, 2);
    let sz = DMatrix::from_diagonal(&DVector::from_vec(vec![-ONE, ONE]));
    let mut sp = DMatrix::zeros(2, 2);
    sp[(1, 0)] = ONE;
    (Operator::from_dense(layout.clone(), sz).unwrap(), Operator::from_dense(layout, sp).unwrap())
}

/// Whether a cutoff is adequate for displacements of modulus `|alpha|`.
pub fn displacement_cutoff_ok(alpha: C64, n_max: usize) -> bool {
    let r = alpha.norm();
    r * r + 6.0 * r + 10.0 <= n_max as f64
}

/// Smallest cutoff passing [`displacement_cutoff_ok`].
pub fn displacement_cutoff(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 6.0 * alpha_abs + 10.0).ceil() as usize
}

/// Spectral factorization of the displacement generator in a truncated Fock
/// space. With `alpha = r e^{i theta}`,
/// `D(alpha)_{nm} = e^{i (theta + pi/2)(n - m)} sum_k W_{nk} W_{mk} e^{-i r mu_k}`
/// where `W diag(mu) W^T` is the eigendecomposition of the real tridiagonal
/// `a + a^dagger`.
#[derive(Clone, Debug)]
pub struct Displacer {
    n_max: usize,
    mu: Vec<f64>,
    w: DMatrix<f64>,
}

impl Displacer {
    pub fn new(n_max: usize) -> Self {
        let x = DMatrix::from_fn(n_max, n_max, |r, c| {
            if r + 1 == c {
                (c as f64).sqrt()
            } else if c + 1 == r {
                (r as f64).sqrt()
            } else {
                0.0
            }
        });
        let (mu, w) = linalg::eigh_real(&x);
        Self { n_max, mu, w }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.mu
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn matrix(&self, alpha: C64) -> DMatrix<C64> {
        let n = self.n_max;
        let (r, theta) = alpha.to_polar();
        let phases: Vec<C64> = self.mu.iter().map(|&m| (-I * r * m).exp()).collect();
        let ph = theta + FRAC_PI_2;
        DMatrix::from_fn(n, n, |row, col| {
            let mut s = ZERO;
            for k in 0..n {
                s += phases[k] * (self.w[(row, k)] * self.w[(col, k)]);
            }
            s * (I * ph * (row as f64 - col as f64)).exp()
        })
    }
}

/// `D(alpha) = exp(alpha a^dagger - alpha^* a)` in the truncated basis.
/// Fails with a truncation error when the cutoff is inadequate unless `force`.
pub fn displacement(alpha: C64, n_max: usize, force: bool) -> Result<Operator> {
    if n_max < 2 {
        return Err(Error::InvalidDimension(format!("Fock cutoff {n_max} < 2")));
    }
    if !force && !displacement_cutoff_ok(alpha, n_max) {
        return Err(Error::Truncation(format!(
            "|alpha| = {:.3} needs n_max >= {}, got {n_max}",
            alpha.norm(),
            displacement_cutoff(alpha.norm())
        )));
    }
    let m = Displacer::new(n_max).matrix(alpha);
    Operator::from_dense(SpaceLayout::single(CAVITY, n_max), m)
}

/// Normalized coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)`
/// truncated to `n_max` levels (not renormalized).
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..n_max {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}

/// Basis vector of `layout` selected by per-factor indices.
pub fn basis_state(layout: &SpaceLayout, parts: &[usize]) -> DVector<C64> {
    let mut v = DVector::zeros(layout.total_dim());
    v[layout.flatten(parts)] = ONE;
    v
}

/// Report from [`DensityMatrix::validate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validation {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.trace_error < 1e-8 && self.hermiticity_error < 1e-10 && self.min_eigenvalue > -1e-8
    }
}

/// Dense density matrix on a layout.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        check_square(&layout, matrix.nrows(), matrix.ncols())?;
        Ok(Self { layout, matrix })
    }

    pub fn pure(layout: SpaceLayout, psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidDimension("zero state vector".into()));
        }
        let psi = psi / C64::new(norm, 0.0);
        Self::from_matrix(layout, &psi * psi.adjoint())
    }

    pub fn basis(layout: SpaceLayout, parts: &[usize]) -> Self {
        let v = basis_state(&layout, parts);
        Self::pure(layout, &v).expect("basis state")
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    /// `tr(O rho)`.
    pub fn expect(&self, op: &Operator) -> Result<C64> {
        if op.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", op.layout(), self.layout)));
        }
        Ok(expect_raw(op, &self.matrix))
    }

    pub fn hermitize(&mut self) {
        let m = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        self.matrix = m;
    }

    pub fn normalize(&mut self) {
        let t = self.trace();
        self.matrix /= t;
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn validate(&self) -> Validation {
        let scale = self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let herm = (&self.matrix - self.matrix.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
        let min_eig = self.eigenvalues().first().copied().unwrap_or(0.0);
        Validation { trace_error: (self.trace() - ONE).norm(), hermiticity_error: herm, min_eigenvalue: min_eig }
    }

    /// Population of the top `k` levels of factor `label`.
    pub fn top_population(&self, label: &str, k: usize) -> Result<f64> {
        let reduced = partial_trace(self, label)?;
        let d = reduced.dim();
        Ok((d.saturating_sub(k)..d).map(|i| reduced.matrix[(i, i)].re).sum())
    }
}

pub(crate) fn expect_raw(op: &Operator, rho: &DMatrix<C64>) -> C64 {
    match op.storage() {
        Storage::Sparse(m) => m.triplets().map(|(r, c, v)| v * rho[(c, r)]).sum(),
        Storage::Dense(m) => m.iter().zip(rho.transpose().iter()).map(|(a, b)| a * b).sum(),
    }
}

/// Reduced state of factor `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &str) -> Result<DensityMatrix> {
    let layout = rho.layout();
    let pos = layout.position(keep)?;
    let (outer, dim, inner) = layout.split(pos);
    let m = rho.matrix();
    let mut out = DMatrix::zeros(dim, dim);
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..dim {
                let ra = (o * dim + a) * inner + i;
                for b in 0..dim {
                    let rb = (o * dim + b) * inner + i;
                    out[(a, b)] += m[(ra, rb)];
                }
            }
        }
    }
    DensityMatrix::from_matrix(SpaceLayout::single(keep, dim), out)
}

/// Transposes the indices of factor `part`.
pub fn partial_transpose(rho: &DensityMatrix, part: &str) -> Result<Operator> {
    let layout = rho.layout();
    let pos = layout.position(part)?;
    let (_, dim, inner) = layout.split(pos);
    let n = layout.total_dim();
    let m = rho.matrix();
    let decompose = |idx: usize| {
        let i = idx % inner;
        let rest = idx / inner;
        (rest / dim, rest % dim, i)
    };
    let out = DMatrix::from_fn(n, n, |r, c| {
        let (o1, a, i1) = decompose(r);
        let (o2, b, i2) = decompose(c);
        m[((o1 * dim + b) * inner + i1, (o2 * dim + a) * inner + i2)]
    });
    Operator::from_dense(layout.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn layout_rejects_duplicates_and_zero_dims() {
        assert!(SpaceLayout::new([("a", 2), ("a", 3)]).is_err());
        assert!(SpaceLayout::new([("a", 0)]).is_err());
        let l = SpaceLayout::new([("a", 2), ("b", 3)]).unwrap();
        assert_eq!(l.total_dim(), 6);
        assert_eq!(l.unflatten(5), vec![1, 2]);
        assert_eq!(l.flatten(&[1, 2]), 5);
        assert!(matches!(l.position("zz"), Err(Error::UnknownFactor(_))));
    }

    #[test]
    fn fock_ops_small_cutoff() {
        assert!(matches!(fock_ops(1), Err(Error::InvalidDimension(_))));
        let (a, _) = fock_ops(2).unwrap();
        assert_eq!(a.to_dense(), DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        let (_, n) = fock_ops(5).unwrap();
        let ev = linalg::eigvalsh(&n.to_dense());
        for (k, v) in ev.iter().enumerate() {
            assert!((v - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn ladder_commutator_is_identity_except_last_level() {
        let (a, _) = fock_ops(6).unwrap();
        let comm = a.commutator(&a.adjoint()).unwrap().to_dense();
        for i in 0..6 {
            let want = if i < 5 { 1.0 } else { -5.0 };
            assert!((comm[(i, i)] - c(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_photon_number() {
        let n_max = 30;
        let psi = DVector::from_vec(coherent_amplitudes(c(2.0), n_max));
        let rho = DensityMatrix::pure(SpaceLayout::single(CAVITY, n_max), &psi).unwrap();
        let (_, num) = fock_ops(n_max).unwrap();
        assert!((rho.expect(&num).unwrap().re - 4.0).abs() < 1e-6);
    }

    #[test]
    fn tensor_examples() {
        let i2 = Operator::identity(SpaceLayout::single("a", 2));
        let i3 = Operator::identity(SpaceLayout::single("b", 3));
        let t = tensor(&[&i2, &i3]);
        assert_eq!(t.to_dense(), DMatrix::identity(6, 6));
        assert_eq!(t.layout().factors().len(), 2);

        let (sz, _) = qubit_ops();
        // sigma_z here is diag(-1, 1); flip sign to match diag(1, -1)
        let sz = sz.scale(-ONE);
        let d = Operator::from_dense(
            SpaceLayout::single("b", 3),
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(1.0), c(2.0)])),
        )
        .unwrap();
        let t = tensor(&[&sz, &d]).to_dense();
        let want = [0.0, 1.0, 2.0, 0.0, -1.0, -2.0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(t[(i, i)], c(*w));
        }
    }

    #[test]
    fn tensor_disambiguates_repeated_labels() {
        let i2 = Operator::identity(SpaceLayout::single("q", 2));
        let t = tensor(&[&i2, &i2, &i2]);
        let labels: Vec<&str> = t.layout().factors().iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels.len(), 3);
        assert!(SpaceLayout::new(labels.iter().map(|l| (*l, 2))).is_ok());
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let layout = SpaceLayout::new([("A", 2), ("B", 2)]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let psi = DVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
        let rho = DensityMatrix::pure(layout, &psi).unwrap();
        for keep in ["A", "B"] {
            let r = partial_trace(&rho, keep).unwrap();
            assert!((r.matrix() - DMatrix::identity(2, 2) * c(0.5)).norm() < 1e-14);
        }
        assert!(matches!(partial_trace(&rho, "C"), Err(Error::UnknownFactor(_))));
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let layout = SpaceLayout::new([("A", 2), ("B", 2)]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let psi = DVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
        let rho = DensityMatrix::pure(layout, &psi).unwrap();
        let pt = partial_transpose(&rho, "A").unwrap();
        let ev = linalg::eigvalsh(&pt.to_dense());
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (v, w) in ev.iter().zip(want) {
            assert!((v - w).abs() < 1e-14);
        }
        assert!(matches!(partial_transpose(&rho, "Z"), Err(Error::UnknownFactor(_))));
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement(ZERO, 12, false).unwrap();
        assert!((d.to_dense() - DMatrix::identity(12, 12)).norm() < 1e-13);
    }

    #[test]
    fn displacement_rejects_small_cutoff_unless_forced() {
        assert!(matches!(displacement(c(2.0), 20, false), Err(Error::Truncation(_))));
        assert!(displacement(c(2.0), 20, true).is_ok());
        assert!(displacement(c(2.0), 26, false).is_ok());
    }
}
