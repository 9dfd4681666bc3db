//! Banded LU factorization with partial pivoting (the LAPACK `gbtf2` scheme)
//! for complex matrices.

use num_complex::Complex64 as C64;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// LU factors of a banded matrix. Storage follows the LAPACK band layout with
/// `kl` extra superdiagonals reserved for pivoting fill-in.
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<C64>,
    ipiv: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl BandedLu {
    /// Factorizes a square sparse matrix whose entries all lie within the
    /// `(kl, ku)` band.
    pub fn factor(a: &CsrMatrix, kl: usize, ku: usize) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidDimension("banded LU needs a square matrix".into()));
        }
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![C64::new(0.0, 0.0); ldab * n];
        for (r, c, v) in a.triplets() {
            if r > c + kl || c > r + ku {
                return Err(Error::InvalidDimension(format!("entry ({r},{c}) outside band ({kl},{ku})")));
            }
            ab[kv + r - c + c * ldab] += v;
        }
        let mut lu = Self { n, kl, ku, ldab, ab, ipiv: vec![0; n], min_pivot: f64::INFINITY, max_pivot: 0.0 };
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ldab
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let ldab = self.ldab;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let mut jp = 0;
            let mut best = -1.0;
            for t in 0..=km {
                let m = self.ab[col + t].norm();
                if m > best {
                    best = m;
                    jp = t;
                }
            }
            self.ipiv[j] = j + jp;
            if best == 0.0 {
                return Err(Error::Singular(format!("zero pivot in column {j}")));
            }
            self.min_pivot = self.min_pivot.min(best);
            self.max_pivot = self.max_pivot.max(best);
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = self.idx(j, c);
                    let b = self.idx(j + jp, c);
                    self.ab.swap(a, b);
                }
            }
            if km > 0 {
                let inv = C64::new(1.0, 0.0) / self.ab[col];
                for t in 1..=km {
                    self.ab[col + t] *= inv;
                }
                for c in (j + 1)..=ju {
                    let u = self.ab[self.idx(j, c)];
                    if u == C64::new(0.0, 0.0) {
                        continue;
                    }
                    // column c rows j+1..=j+km are contiguous in band storage
                    let dst = self.idx(j + 1, c);
                    let (head, tail) = self.ab.split_at_mut(dst);
                    let (lhs, rhs) = (&head[col + 1..col + 1 + km], &mut tail[..km]);
                    for (d, &l) in rhs.iter_mut().zip(lhs) {
                        *d -= l * u;
                    }
                }
            }
        }
        Ok(())
    }

    /// Ratio of the smallest to the largest pivot modulus; a crude
    /// conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        let kv = kl + ku;
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != C64::new(0.0, 0.0) {
                let col = j * self.ldab + kv;
                for t in 1..=km {
                    b[j + t] -= self.ab[col + t] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.idx(j, j)];
            let bj = b[j];
            let lo = j.saturating_sub(kv);
            for i in lo..j {
                b[i] -= self.ab[self.idx(i, j)] * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn solves_random_banded_system_with_pivoting() {
        let n: usize = 30;
        let (kl, ku) = (3, 2);
        let mut trip = Vec::new();
        let mut seed = 12345u64;
        let mut rnd = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        for r in 0..n {
            for c in r.saturating_sub(kl)..=(r + ku).min(n - 1) {
                // small diagonal forces row swaps
                let scale = if r == c { 1e-3 } else { 1.0 };
                trip.push((r, c, C64::new(rnd(), rnd()) * scale));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, trip);
        let x_true: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.1)).collect();
        let mut b = vec![C64::new(0.0, 0.0); n];
        a.matvec(&x_true, &mut b);
        let lu = BandedLu::factor(&a, kl, ku).unwrap();
        lu.solve_in_place(&mut b);
        let err: f64 = b.iter().zip(&x_true).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "err {err}");

        let dense = a.to_dense();
        let rhs = DVector::from_iterator(n, x_true.iter().copied());
        let y = dense.clone().lu().solve(&(&dense * &rhs)).unwrap();
        assert!((y - rhs).norm() < 1e-9);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))]);
        assert!(matches!(BandedLu::factor(&a, 1, 1), Err(Error::Singular(_))));
    }
}
