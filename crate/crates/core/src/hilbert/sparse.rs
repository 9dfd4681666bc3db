//! Compressed sparse row storage for complex matrices, plus the handful of
//! kernels the solvers need (sparse times dense in both orders, Kronecker
//! products, sparse-sparse products).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = Self { nrows, ncols, indptr, indices, values };
        m.prune(0.0);
        m
    }

    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        let mut trip = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.norm() > tol {
                    trip.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trip)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let trip = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), diag.len(), trip)
    }

    /// Drops stored entries with modulus `<= tol`.
    pub fn prune(&mut self, tol: f64) {
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k].norm() > tol {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let cols = &self.indices[self.indptr[r]..self.indptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => self.values[self.indptr[r] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let trip = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, trip)
    }

    pub fn transpose(&self) -> Self {
        let trip = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, trip)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.prune(0.0);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "shape mismatch in add");
        let trip = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Sparse-sparse product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in matmul");
        let mut trip = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &cols {
                trip.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                touched[c] = false;
            }
            cols.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, trip)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.nrows, other.ncols);
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                trip.push((r1 * p + r2, c1 * q + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * p, self.ncols * q, trip)
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut s = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            y[r] = s;
        }
    }

    /// `out = alpha * self * b` (column-major dense `b`), overwriting `out`.
    pub fn mul_dense_into(&self, b: &DMatrix<C64>, alpha: C64, out: &mut DMatrix<C64>) {
        assert_eq!(self.ncols, b.nrows());
        assert_eq!((out.nrows(), out.ncols()), (self.nrows, b.ncols()));
        let n = b.nrows();
        let m = self.nrows;
        let bs = b.as_slice();
        let os = out.as_mut_slice();
        for j in 0..b.ncols() {
            let bcol = &bs[j * n..(j + 1) * n];
            let ocol = &mut os[j * m..(j + 1) * m];
            for r in 0..m {
                let mut s = C64::new(0.0, 0.0);
                for k in self.indptr[r]..self.indptr[r + 1] {
                    s += self.values[k] * bcol[self.indices[k]];
                }
                ocol[r] = alpha * s;
            }
        }
    }

    pub fn mul_dense(&self, b: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.nrows, b.ncols());
        self.mul_dense_into(b, C64::new(1.0, 0.0), &mut out);
        out
    }

    /// `out += alpha * b * self` for column-major dense `b`.
    pub fn dense_mul_acc(&self, b: &DMatrix<C64>, alpha: C64, out: &mut DMatrix<C64>) {
        assert_eq!(b.ncols(), self.nrows);
        assert_eq!((out.nrows(), out.ncols()), (b.nrows(), self.ncols));
        let n = b.nrows();
        let bs = b.as_slice();
        let os = out.as_mut_slice();
        for k in 0..self.nrows {
            let bcol = &bs[k * n..(k + 1) * n];
            for idx in self.indptr[k]..self.indptr[k + 1] {
                let c = self.indices[idx];
                let v = alpha * self.values[idx];
                let ocol = &mut os[c * n..(c + 1) * n];
                for (o, &x) in ocol.iter_mut().zip(bcol) {
                    *o += v * x;
                }
            }
        }
    }

    pub fn dense_mul(&self, b: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(b.nrows(), self.ncols);
        self.dense_mul_acc(b, C64::new(1.0, 0.0), &mut out);
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (_, c, v) in self.triplets() {
            sums[c] += v.norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns `P A P^T` where `perm[new] = old`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert_eq!(self.nrows, self.ncols);
        assert_eq!(perm.len(), self.nrows);
        let mut inv = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let trip = self.triplets().map(|(r, c, v)| (inv[r], inv[c], v)).collect();
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    /// Lower and upper bandwidths `(kl, ku)`.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (r, c, _) in self.triplets() {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        (kl, ku)
    }
}

/// Reverse Cuthill-McKee ordering on the symmetrized sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in a.triplets() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        let start = pseudo_peripheral(&adj, &degree, start);
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_unstable_by_key(|&w| degree[w]);
            for w in nbrs {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], start: usize) -> usize {
    let mut node = start;
    let mut ecc = 0;
    loop {
        let levels = bfs_levels(adj, node);
        let depth = *levels.iter().filter_map(|l| *l).collect::<Vec<_>>().iter().max().unwrap_or(&0);
        if depth <= ecc {
            return node;
        }
        ecc = depth;
        node = levels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(depth))
            .min_by_key(|(i, _)| degree[*i])
            .map(|(i, _)| i)
            .unwrap();
    }
}

fn bfs_levels(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut levels = vec![None; adj.len()];
    levels[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let l = levels[v].unwrap();
        for &w in &adj[v] {
            if levels[w].is_none() {
                levels[w] = Some(l + 1);
                queue.push_back(w);
            }
        }
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, c(1.0)), (0, 2, C64::new(0.0, 2.0)), (1, 1, c(3.0)), (2, 0, c(-1.0)), (2, 0, c(0.5))],
        )
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = sample();
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(2, 0), c(-0.5));
        assert_eq!(m.get(1, 2), c(0.0));
    }

    #[test]
    fn dense_products_agree() {
        let a = sample();
        let b = DMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let ad = a.to_dense();
        assert!((a.mul_dense(&b) - &ad * &b).norm() < 1e-14);
        let bt = b.transpose();
        assert!((a.dense_mul(&bt) - &bt * &ad).norm() < 1e-14);
        assert!((a.matmul(&a).to_dense() - &ad * &ad).norm() < 1e-14);
        assert!((a.adjoint().to_dense() - ad.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn kron_matches_nalgebra() {
        let a = sample();
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0)), (1, 0, C64::new(0.0, 1.0))]);
        let want = a.to_dense().kronecker(&b.to_dense());
        assert!((a.kron(&b).to_dense() - want).norm() < 1e-14);
    }

    #[test]
    fn rcm_reduces_bandwidth_of_shuffled_tridiagonal() {
        let n = 40;
        // tridiagonal chain with labels scrambled by a fixed stride
        let label = |i: usize| (i * 7) % n;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((label(i), label(i), c(2.0)));
            if i + 1 < n {
                trip.push((label(i), label(i + 1), c(-1.0)));
                trip.push((label(i + 1), label(i), c(-1.0)));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, trip);
        assert!(a.bandwidths().0 > 5);
        let perm = reverse_cuthill_mckee(&a);
        let p = a.permute_symmetric(&perm);
        assert_eq!(p.bandwidths(), (1, 1));
    }
}
