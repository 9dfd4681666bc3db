//! Right-hand side of the Lindblad equation on a dense, column-major density
//! matrix.
//!
//! With `A(t) = -i H_eff(t)` and `H_eff = H - i sum_k r_k L_k^dag L_k`,
//! `d rho/dt = X + X^dag + sum_k 2 r_k L_k rho L_k^dag` where `X = A rho`.
//! The harmonic parts of `A` share one sparsity pattern so that `A(t)` costs
//! a few vector updates per evaluation.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{CsrMatrix, I, ZERO};
use crate::models::TimeDependentGenerator;

struct HarmonicValues {
    /// Angular frequency in rad/μs.
    angular: f64,
    /// `-i H_k` on the shared pattern.
    forward: Vec<C64>,
    /// `-i H_k^dag` on the shared pattern.
    backward: Vec<C64>,
}

/// One `2 r L rho L^dag` contribution: `out[target] += coeff * rho[source]`.
#[derive(Clone, Copy, Debug)]
struct Sandwich {
    target: usize,
    source: usize,
    coeff: C64,
}

pub struct LindbladKernel {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    base: Vec<C64>,
    harmonics: Vec<HarmonicValues>,
    values: Vec<C64>,
    sandwiches: Vec<Sandwich>,
    /// Jumps too dense for the pairwise expansion: `(2 r, L)`.
    dense_jumps: Vec<(f64, DMatrix<C64>)>,
    scratch: Vec<C64>,
}

fn values_on_pattern(m: &CsrMatrix, indptr: &[usize], indices: &[usize], scale: C64) -> Vec<C64> {
    let mut out = vec![ZERO; indices.len()];
    for r in 0..indptr.len() - 1 {
        for k in indptr[r]..indptr[r + 1] {
            out[k] = scale * m.get(r, indices[k]);
        }
    }
    out
}

impl LindbladKernel {
    pub fn new(gen: &TimeDependentGenerator) -> Result<Self> {
        let n = gen.layout().total_dim();
        let mut heff = gen.hamiltonian.to_csr();
        for d in &gen.dissipators {
            if d.rate < 0.0 {
                return Err(Error::InvalidOptions(format!("negative dissipation rate {}", d.rate)));
            }
            let l = d.jump.to_csr();
            heff = heff.sub(&l.adjoint().matmul(&l).scale(I * d.rate));
        }
        let harmonic_ops: Vec<(f64, CsrMatrix)> =
            gen.harmonics.iter().map(|h| (h.frequency, h.op.to_csr())).collect();

        let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut mark = |m: &CsrMatrix| {
            for (r, c, _) in m.triplets() {
                rows[r].insert(c);
            }
        };
        mark(&heff);
        for (_, h) in &harmonic_ops {
            mark(h);
            mark(&h.adjoint());
        }
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::new();
        for (r, cols) in rows.iter().enumerate() {
            indices.extend(cols.iter().copied());
            indptr[r + 1] = indices.len();
        }

        let minus_i = -I;
        let base = values_on_pattern(&heff, &indptr, &indices, minus_i);
        let harmonics = harmonic_ops
            .iter()
            .map(|(f, h)| HarmonicValues {
                angular: TAU * f,
                forward: values_on_pattern(h, &indptr, &indices, minus_i),
                backward: values_on_pattern(&h.adjoint(), &indptr, &indices, minus_i),
            })
            .collect();

        let mut sandwiches = Vec::new();
        let mut dense_jumps = Vec::new();
        for d in &gen.dissipators {
            let l = d.jump.to_csr();
            let w = 2.0 * d.rate;
            let nnz = l.nnz();
            if nnz * nnz <= 4 * nnz * n {
                let trip: Vec<(usize, usize, C64)> = l.triplets().collect();
                for &(r1, c1, v1) in &trip {
                    for &(r2, c2, v2) in &trip {
                        sandwiches.push(Sandwich { target: r1 + r2 * n, source: c1 + c2 * n, coeff: v1 * v2.conj() * w });
                    }
                }
            } else {
                dense_jumps.push((w, l.to_dense()));
            }
        }
        sandwiches.sort_by_key(|s| (s.source, s.target));
        sandwiches.dedup_by(|next, kept| {
            let same = next.source == kept.source && next.target == kept.target;
            if same {
                kept.coeff += next.coeff;
            }
            same
        });
        sandwiches.retain(|s| s.coeff != ZERO);

        let values = base.clone();
        Ok(Self { n, indptr, indices, base, harmonics, values, sandwiches, dense_jumps, scratch: vec![ZERO; n * n] })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries of `A(t)`.
    pub fn pattern_nnz(&self) -> usize {
        self.indices.len()
    }

    fn refresh(&mut self, t: f64) {
        if self.harmonics.is_empty() {
            return;
        }
        self.values.copy_from_slice(&self.base);
        for h in &self.harmonics {
            let ph = C64::from_polar(1.0, -h.angular * t);
            let phc = ph.conj();
            for ((v, f), b) in self.values.iter_mut().zip(&h.forward).zip(&h.backward) {
                *v += ph * f + phc * b;
            }
        }
    }

    /// `out = L_t[rho]` for column-major `rho` of length `n^2`. `rho` must be
    /// Hermitian.
    pub fn apply(&mut self, t: f64, rho: &[C64], out: &mut [C64]) {
        let n = self.n;
        self.refresh(t);
        // Y = rho A^dag column by column, so X = A rho = Y^dag.
        let y = &mut self.scratch;
        y.iter_mut().for_each(|v| *v = ZERO);
        for r in 0..n {
            let ycol = &mut y[r * n..(r + 1) * n];
            for k in self.indptr[r]..self.indptr[r + 1] {
                let v = self.values[k].conj();
                let c = self.indices[k];
                let col = &rho[c * n..(c + 1) * n];
                for (o, x) in ycol.iter_mut().zip(col) {
                    *o += v * x;
                }
            }
        }
        for j in 0..n {
            for i in j..n {
                let a = y[i + j * n];
                let b = y[j + i * n];
                out[i + j * n] = a + b.conj();
                out[j + i * n] = b + a.conj();
            }
        }
        for s in &self.sandwiches {
            out[s.target] += s.coeff * rho[s.source];
        }
        if !self.dense_jumps.is_empty() {
            let r = DMatrix::from_column_slice(n, n, rho);
            for (w, l) in &self.dense_jumps {
                let term = l * &r * l.adjoint() * C64::new(*w, 0.0);
                for (o, v) in out.iter_mut().zip(term.iter()) {
                    *o += v;
                }
            }
        }
    }

    /// Column-stacked superoperator of the static part: `vec(L[rho]) = S vec(rho)`
    /// with `vec` index `i + j n`.
    pub fn superoperator(&self) -> CsrMatrix {
        let n = self.n;
        let a = &self.base;
        let mut trip = Vec::with_capacity(2 * n * a.len() + self.sandwiches.len());
        for r in 0..n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let c = self.indices[k];
                let v = a[k];
                if v == ZERO {
                    continue;
                }
                for j in 0..n {
                    // (A rho)_{rj} gets A_{rc} rho_{cj}
                    trip.push((r + j * n, c + j * n, v));
                    // (rho A^dag)_{jr} gets rho_{jc} conj(A_{rc})
                    trip.push((j + r * n, j + c * n, v.conj()));
                }
            }
        }
        for s in &self.sandwiches {
            trip.push((s.target, s.source, s.coeff));
        }
        for (w, l) in &self.dense_jumps {
            let csr = CsrMatrix::from_dense(l, 0.0);
            let entries: Vec<_> = csr.triplets().collect();
            for &(r1, c1, v1) in &entries {
                for &(r2, c2, v2) in &entries {
                    trip.push((r1 + r2 * n, c1 + c2 * n, v1 * v2.conj() * *w));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, trip)
    }
}
