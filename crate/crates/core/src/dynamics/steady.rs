//! Steady states of static Lindblad generators.
//!
//! The vectorized Liouvillian splits into independent blocks; the block that
//! carries the populations is reordered by reverse Cuthill–McKee and solved by
//! banded LU with one population pinned to one. Any other block carrying
//! populations means the kernel is at least two-dimensional.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::kernel::LindbladKernel;
use super::ode::{integrate_adaptive, AdaptiveOptions};
use crate::error::{Error, Result};
use crate::hilbert::banded::BandedLu;
use crate::hilbert::sparse::reverse_cuthill_mckee;
use crate::hilbert::{CsrMatrix, DensityMatrix, ONE, ZERO};
use crate::models::TimeDependentGenerator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    Direct,
    TimeMarching,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyOptions {
    /// Accept the direct solution when `||L x|| < residual_tol * ||L||_F`.
    pub residual_tol: f64,
    /// Stop time-marching once `||d rho/dt||_F` falls below this.
    pub march_tol: f64,
    /// Give up time-marching after this many μs.
    pub march_horizon: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-10, march_tol: 1e-9, march_horizon: 1e4 }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub method: SteadyMethod,
    /// `||L[rho]||_F / ||L||_F`.
    pub residual: f64,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Vectorized indices of the block containing the populations.
fn population_block(s: &CsrMatrix, n: usize) -> Result<Vec<usize>> {
    let mut sets = DisjointSets::new(n * n);
    for (r, c, _) in s.triplets() {
        sets.union(r, c);
    }
    let root = sets.find(0);
    for k in 1..n {
        if sets.find(k + k * n) != root {
            return Err(Error::DegenerateSteadyState(format!(
                "populations of levels 0 and {k} are never coupled; the steady state is not unique"
            )));
        }
    }
    Ok((0..n * n).filter(|&i| sets.find(i) == root).collect())
}

/// Solves the block with population `pin` fixed to one.
fn pinned_solve(s: &CsrMatrix, block: &[usize], local: &[usize], pin: usize) -> Result<Vec<C64>> {
    let m = block.len();
    let pin_local = local[pin];
    let mut trip = Vec::new();
    for (li, &gi) in block.iter().enumerate() {
        if li == pin_local {
            continue;
        }
        for (c, v) in s.row(gi) {
            trip.push((li, local[c], v));
        }
    }
    trip.push((pin_local, pin_local, ONE));
    let sub = CsrMatrix::from_triplets(m, m, trip);
    let perm = reverse_cuthill_mckee(&sub);
    let permuted = sub.permute_symmetric(&perm);
    let (kl, ku) = permuted.bandwidths();
    log::debug!("steady block of size {m}, bandwidths ({kl}, {ku})");
    let lu = BandedLu::factor(&permuted, kl, ku).map_err(|e| match e {
        Error::Singular(msg) => Error::DegenerateSteadyState(msg),
        other => other,
    })?;
    if lu.pivot_ratio() < 1e-13 {
        return Err(Error::DegenerateSteadyState(format!(
            "pinned Liouvillian nearly singular (pivot ratio {:.2e})",
            lu.pivot_ratio()
        )));
    }
    let mut rhs: Vec<C64> = perm.iter().map(|&old| if old == pin_local { ONE } else { ZERO }).collect();
    lu.solve_in_place(&mut rhs);
    let mut out = vec![ZERO; m];
    for (new, &old) in perm.iter().enumerate() {
        out[old] = rhs[new];
    }
    Ok(out)
}

fn assemble(gen: &TimeDependentGenerator, n: usize, block: &[usize], x: &[C64]) -> Result<DensityMatrix> {
    let mut full = vec![ZERO; n * n];
    for (&g, &v) in block.iter().zip(x) {
        full[g] = v;
    }
    let mut rho = DensityMatrix::from_matrix(gen.layout().clone(), DMatrix::from_column_slice(n, n, &full))?;
    rho.hermitize();
    rho.normalize();
    Ok(rho)
}

fn relative_residual(s: &CsrMatrix, rho: &DensityMatrix, scale: f64) -> f64 {
    let mut out = vec![ZERO; s.nrows()];
    s.matvec(rho.matrix().as_slice(), &mut out);
    out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / scale
}

/// Unique steady state of a static, dissipative generator.
pub fn steady_state(gen: &TimeDependentGenerator, opts: &SteadyOptions) -> Result<SteadyState> {
    if !gen.is_static() {
        return Err(Error::InvalidOptions("steady state needs a generator without harmonics".into()));
    }
    if !gen.dissipators.iter().any(|d| d.rate > 0.0) {
        return Err(Error::InvalidOptions("steady state needs at least one positive dissipation rate".into()));
    }
    let n = gen.layout().total_dim();
    let mut kernel = LindbladKernel::new(gen)?;
    let s = kernel.superoperator();
    let scale = s.norm_frobenius();
    let block = population_block(&s, n)?;
    let mut local = vec![usize::MAX; n * n];
    for (li, &g) in block.iter().enumerate() {
        local[g] = li;
    }

    let diag = |k: usize| k + k * n;
    let pin = (0..n).min_by(|&a, &b| s.get(diag(a), diag(a)).norm().total_cmp(&s.get(diag(b), diag(b)).norm())).unwrap();
    let mut x = pinned_solve(&s, &block, &local, diag(pin))?;
    let populations: Vec<f64> = (0..n).map(|k| x[local[diag(k)]].re).collect();
    let (argmax, pmax) =
        populations.iter().enumerate().fold((0, f64::MIN), |acc, (k, &p)| if p > acc.1 { (k, p) } else { acc });
    if pmax <= 0.0 || 1.0 / pmax < 1e-6 {
        log::debug!("re-pinning steady state at level {argmax}");
        x = pinned_solve(&s, &block, &local, diag(argmax))?;
    }
    let rho = assemble(gen, n, &block, &x)?;
    let residual = relative_residual(&s, &rho, scale);
    if residual < opts.residual_tol {
        return Ok(SteadyState { rho, method: SteadyMethod::Direct, residual });
    }

    log::warn!("direct steady-state residual {residual:.2e} too large; falling back to time-marching");
    let mut y: Vec<C64> = rho.matrix().as_slice().to_vec();
    let mut t = 0.0;
    let chunk = 10.0;
    let ode_opts = AdaptiveOptions { rtol: 1e-10, atol: 1e-12, ..AdaptiveOptions::default() };
    let mut dy = vec![ZERO; n * n];
    loop {
        kernel.apply(t, &y, &mut dy);
        let rate = dy.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if rate < opts.march_tol {
            break;
        }
        if t >= opts.march_horizon {
            return Err(Error::Stiffness(format!(
                "time-marching to the steady state stalled at ||d rho/dt|| = {rate:.2e} after {t} us"
            )));
        }
        let grid = [t, t + chunk];
        integrate_adaptive(
            |tt, yy: &[C64], out: &mut [C64]| kernel.apply(tt, yy, out),
            &mut y,
            &grid,
            &ode_opts,
            |_| {},
            |_, _, _| Ok(()),
        )?;
        t += chunk;
    }
    let mut rho = DensityMatrix::from_matrix(gen.layout().clone(), DMatrix::from_column_slice(n, n, &y))?;
    rho.hermitize();
    rho.normalize();
    let residual = relative_residual(&s, &rho, scale);
    Ok(SteadyState { rho, method: SteadyMethod::TimeMarching, residual })
}
