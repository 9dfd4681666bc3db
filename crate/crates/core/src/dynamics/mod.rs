//! Time evolution and steady states of Lindblad master equations.

pub mod kernel;
pub mod ode;
pub mod steady;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{expect_raw, DensityMatrix, Operator, CAVITY, ZERO};
use crate::models::TimeDependentGenerator;

pub use kernel::LindbladKernel;
pub use ode::{AdaptiveOptions, OdeStats};
pub use steady::{steady_state, SteadyMethod, SteadyOptions, SteadyState};

/// Steps per period of the fastest harmonic for fixed-step integration.
pub const STEPS_PER_PERIOD: f64 = 40.0;

/// Population threshold on the two highest Fock levels.
pub const FOCK_GUARD_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    FixedRk4 { dt: f64 },
    AdaptiveRk45 { rtol: f64, atol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub method: Method,
    /// Fail with a truncation error when the top two Fock levels hold more
    /// than [`FOCK_GUARD_THRESHOLD`] at a sample time.
    pub fock_guard: bool,
    /// Keep the density matrix at every sample time.
    pub snapshots: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::adaptive(1e-8, 1e-10)
    }
}

impl SolverOptions {
    pub fn adaptive(rtol: f64, atol: f64) -> Self {
        Self { method: Method::AdaptiveRk45 { rtol, atol }, fock_guard: true, snapshots: false }
    }

    pub fn fixed(dt: f64) -> Self {
        Self { method: Method::FixedRk4 { dt }, fock_guard: true, snapshots: false }
    }

    /// Fixed RK4 resolving the fastest harmonic for driven generators,
    /// adaptive RK45 otherwise.
    pub fn for_generator(gen: &TimeDependentGenerator) -> Self {
        if gen.is_static() {
            Self::default()
        } else {
            Self::fixed(1.0 / (STEPS_PER_PERIOD * gen.max_frequency()))
        }
    }

    pub fn with_snapshots(mut self, on: bool) -> Self {
        self.snapshots = on;
        self
    }

    pub fn with_fock_guard(mut self, on: bool) -> Self {
        self.fock_guard = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::FixedRk4 { dt } if !(dt > 0.0 && dt.is_finite()) => {
                Err(Error::InvalidOptions(format!("fixed step must be positive, got {dt}")))
            }
            Method::AdaptiveRk45 { rtol, atol } => {
                AdaptiveOptions { rtol, atol, ..AdaptiveOptions::default() }.validate()
            }
            _ => Ok(()),
        }
    }
}

type ProbeFn = dyn Fn(&DensityMatrix) -> f64 + Send + Sync;

/// A named real quantity recorded along a trajectory.
#[derive(Clone)]
pub enum Probe {
    /// `Re tr(O rho)`.
    Expectation { name: String, op: Operator },
    /// `<psi|rho|psi>` for a normalized `psi`.
    Overlap { name: String, psi: DVector<C64> },
    Custom { name: String, f: Arc<ProbeFn> },
}

impl fmt::Debug for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            Probe::Expectation { .. } => "Expectation",
            Probe::Overlap { .. } => "Overlap",
            Probe::Custom { .. } => "Custom",
        };
        write!(f, "{kind}({})", self.name())
    }
}

impl Probe {
    pub fn expectation(name: impl Into<String>, op: Operator) -> Self {
        Probe::Expectation { name: name.into(), op }
    }

    pub fn overlap(name: impl Into<String>, psi: DVector<C64>) -> Self {
        let norm = psi.norm();
        Probe::Overlap { name: name.into(), psi: psi / C64::new(norm, 0.0) }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(&DensityMatrix) -> f64 + Send + Sync + 'static) -> Self {
        Probe::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        match self {
            Probe::Expectation { name, .. } | Probe::Overlap { name, .. } | Probe::Custom { name, .. } => name,
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let d = match self {
            Probe::Expectation { op, .. } => op.dim(),
            Probe::Overlap { psi, .. } => psi.len(),
            Probe::Custom { .. } => dim,
        };
        if d != dim {
            return Err(Error::LayoutMismatch(format!("probe `{}` has dimension {d}, state {dim}", self.name())));
        }
        Ok(())
    }

    fn eval(&self, rho: &DensityMatrix) -> f64 {
        match self {
            Probe::Expectation { op, .. } => expect_raw(op, rho.matrix()).re,
            Probe::Overlap { psi, .. } => (psi.adjoint() * rho.matrix() * psi)[(0, 0)].re,
            Probe::Custom { f, .. } => f(rho),
        }
    }
}

/// Sampled output of [`evolve`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub observables: Vec<(String, Vec<f64>)>,
    pub snapshots: Vec<(f64, DensityMatrix)>,
    pub final_state: DensityMatrix,
    /// Largest `|tr rho - 1|` over the samples.
    pub max_trace_error: f64,
    /// Smallest eigenvalue over the snapshots, when kept.
    pub min_eigenvalue: Option<f64>,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// `n + 1` equally spaced times from `0` to `t_max`, with `n` the nearest
/// integer to `t_max / dt`.
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && dt > 0.0) {
        return Err(Error::InvalidOptions(format!("grid needs t_max > 0 and dt > 0, got {t_max}, {dt}")));
    }
    let n = (t_max / dt).round().max(1.0) as usize;
    Ok((0..=n).map(|k| t_max * k as f64 / n as f64).collect())
}

fn hermitize_in_place(y: &mut [C64], n: usize) {
    for j in 0..n {
        y[j + j * n].im = 0.0;
        for i in j + 1..n {
            let a = y[i + j * n];
            let b = y[j + i * n];
            let m = (a + b.conj()) * 0.5;
            y[i + j * n] = m;
            y[j + i * n] = m.conj();
        }
    }
}

/// Diagonal indices whose cavity occupation is one of the two highest.
fn guarded_indices(rho0: &DensityMatrix) -> Vec<usize> {
    let layout = rho0.layout();
    let Ok(pos) = layout.position(CAVITY) else { return Vec::new() };
    let dim = layout.factors()[pos].1;
    (0..layout.total_dim()).filter(|&i| layout.unflatten(i)[pos] + 2 >= dim).collect()
}

/// Integrates `rho0` under `gen` and samples `probes` at every time in `t_grid`.
pub fn evolve(
    gen: &TimeDependentGenerator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &SolverOptions,
    probes: &[Probe],
) -> Result<Trajectory> {
    opts.validate()?;
    if rho0.layout() != gen.layout() {
        return Err(Error::LayoutMismatch(format!("state {:?} vs generator {:?}", rho0.layout(), gen.layout())));
    }
    let n = rho0.dim();
    for p in probes {
        p.check(n)?;
    }
    if !gen.is_static() {
        let limit = 1.0 / (STEPS_PER_PERIOD * gen.max_frequency());
        match opts.method {
            Method::FixedRk4 { dt } if dt <= limit * (1.0 + 1e-9) => {}
            _ => {
                return Err(Error::InvalidOptions(format!(
                    "driven generator needs fixed RK4 with dt <= {limit:.3e} us"
                )))
            }
        }
    }

    let mut kernel = LindbladKernel::new(gen)?;
    let layout = rho0.layout().clone();
    let guard = if opts.fock_guard { guarded_indices(rho0) } else { Vec::new() };
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(t_grid.len()); probes.len()];
    let mut snapshots = Vec::new();
    let mut max_trace_error = 0.0f64;
    let mut min_eigenvalue: Option<f64> = None;

    let mut y: Vec<C64> = rho0.matrix().as_slice().to_vec();
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| kernel.apply(t, y, dy);
    let post = |y: &mut [C64]| hermitize_in_place(y, n);
    let observe = |_: usize, t: f64, y: &[C64]| -> Result<()> {
        let top: f64 = guard.iter().map(|&i| y[i + i * n].re).sum();
        if top > FOCK_GUARD_THRESHOLD {
            return Err(Error::Truncation(format!(
                "top two Fock levels hold {top:.3e} at t = {t} us; raise the cutoff"
            )));
        }
        let rho = DensityMatrix::from_matrix(layout.clone(), DMatrix::from_column_slice(n, n, y))?;
        max_trace_error = max_trace_error.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        for (s, p) in series.iter_mut().zip(probes) {
            s.push(p.eval(&rho));
        }
        if opts.snapshots {
            let lo = rho.eigenvalues().first().copied().unwrap_or(0.0);
            min_eigenvalue = Some(min_eigenvalue.map_or(lo, |m| m.min(lo)));
            snapshots.push((t, rho));
        }
        Ok(())
    };
    let stats = match opts.method {
        Method::FixedRk4 { dt } => ode::integrate_rk4(rhs, &mut y, t_grid, dt, post, observe)?,
        Method::AdaptiveRk45 { rtol, atol } => {
            let o = AdaptiveOptions { rtol, atol, ..AdaptiveOptions::default() };
            ode::integrate_adaptive(rhs, &mut y, t_grid, &o, post, observe)?
        }
    };
    let final_state = DensityMatrix::from_matrix(layout, DMatrix::from_column_slice(n, n, &y))?;
    Ok(Trajectory {
        times: t_grid.to_vec(),
        observables: probes.iter().map(|p| p.name().to_string()).zip(series).collect(),
        snapshots,
        final_state,
        max_trace_error,
        min_eigenvalue,
        stats,
    })
}

/// Linear fit `P(t) = intercept - rate * t` of the population left in a
/// subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageFit {
    /// Initial leakage rate in 1/μs.
    pub rate: f64,
    pub intercept: f64,
    /// RMS deviation of the samples from the fitted line.
    pub residual: f64,
    pub times: Vec<f64>,
    pub population: Vec<f64>,
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept, rms)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / m).sqrt();
    (slope, intercept, rms)
}

/// Evolves `rho0` for `horizon` μs, records the population of `projector`
/// at `samples + 1` times and fits its initial linear decay.
pub fn leakage_probe(
    gen: &TimeDependentGenerator,
    rho0: &DensityMatrix,
    horizon: f64,
    projector: &Operator,
    samples: usize,
    opts: &SolverOptions,
) -> Result<LeakageFit> {
    if samples < 2 {
        return Err(Error::InvalidOptions("leakage fit needs at least two samples".into()));
    }
    let grid = uniform_grid(horizon, horizon / samples as f64)?;
    let traj = evolve(gen, rho0, &grid, opts, &[Probe::expectation("P", projector.clone())])?;
    let population = traj.get("P").expect("probe recorded").to_vec();
    let (slope, intercept, residual) = linear_fit(&grid, &population);
    let drop = (population[0] - population[population.len() - 1]).abs();
    if residual > 0.1 * drop.max(f64::MIN_POSITIVE) {
        log::warn!("leakage population is far from linear: rms {residual:.2e} against total drop {drop:.2e}");
    }
    Ok(LeakageFit { rate: -slope, intercept, residual, times: grid, population })
}

/// Maps `f` over `items` on the rayon pool, preserving order.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// `||L[rho]||_F` for a static generator.
pub fn lindblad_residual(gen: &TimeDependentGenerator, rho: &DensityMatrix) -> Result<f64> {
    let mut k = LindbladKernel::new(gen)?;
    let n = rho.dim();
    let mut out = vec![ZERO; n * n];
    k.apply(0.0, rho.matrix().as_slice(), &mut out);
    Ok(out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fock_ops, qubit_ops, tensor, SpaceLayout, QUBIT};
    use crate::models::{build_effective, parity_operator, EffectiveParams};
    use std::f64::consts::PI;

    fn qubit_fock(n_max: usize) -> SpaceLayout {
        SpaceLayout::new([(QUBIT, 2), (CAVITY, n_max)]).unwrap()
    }

    fn photon_number(n_max: usize) -> Operator {
        let (sz, _) = qubit_ops();
        let id = Operator::identity(sz.layout().clone());
        let (_, n) = fock_ops(n_max).unwrap();
        tensor(&[&id, &n])
    }

    #[test]
    fn uncoupled_ground_state_is_stationary() {
        let n_max = 10;
        let gen = build_effective(&EffectiveParams::new(1.0, 1.0, 0.0, -0.3, 0.1), n_max).unwrap();
        let rho0 = DensityMatrix::basis(qubit_fock(n_max), &[0, 0]);
        let grid = uniform_grid(2.0, 0.1).unwrap();
        let traj = evolve(&gen, &rho0, &grid, &SolverOptions::default(), &[Probe::expectation("n", photon_number(n_max))])
            .unwrap();
        assert!(traj.get("n").unwrap().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn displaced_oscillator_photon_number_and_revival() {
        let n_max = 50;
        let gen = build_effective(&EffectiveParams::new(0.0, 1.0, 2.0, 0.0, 0.0), n_max).unwrap();
        let layout = qubit_fock(n_max);
        let rho0 = DensityMatrix::basis(layout.clone(), &[0, 0]);
        let psi0 = crate::hilbert::basis_state(&layout, &[0, 0]);
        let grid = uniform_grid(1.0, 0.05).unwrap();
        let probes = [Probe::expectation("n", photon_number(n_max)), Probe::overlap("P", psi0)];
        let traj = evolve(&gen, &rho0, &grid, &SolverOptions::adaptive(1e-10, 1e-12), &probes).unwrap();
        for (t, n) in grid.iter().zip(traj.get("n").unwrap()) {
            let exact = 16.0 * (PI * t).sin().powi(2);
            assert!((n - exact).abs() < 1e-4, "t = {t}: {n} vs {exact}");
        }
        assert!((traj.get("P").unwrap().last().unwrap() - 1.0).abs() < 1e-4);
        assert!(traj.max_trace_error < 1e-8);
    }

    #[test]
    fn parity_conserved_without_loss() {
        let n_max = 30;
        let gen = build_effective(&EffectiveParams::new(0.4, 1.0, 0.9, -1.2, 0.0), n_max).unwrap();
        let rho0 = DensityMatrix::basis(qubit_fock(n_max), &[0, 0]);
        let grid = uniform_grid(1.5, 0.1).unwrap();
        let probes = [Probe::expectation("parity", parity_operator(n_max).unwrap())];
        let opts = SolverOptions::default().with_snapshots(true);
        let traj = evolve(&gen, &rho0, &grid, &opts, &probes).unwrap();
        assert!(traj.get("parity").unwrap().iter().all(|p| (p - 1.0).abs() < 1e-6));
        assert!(traj.min_eigenvalue.unwrap() > -1e-6);
        assert_eq!(traj.snapshots.len(), grid.len());
    }

    #[test]
    fn fock_guard_names_violation_time() {
        let n_max = 6;
        let gen = build_effective(&EffectiveParams::new(0.0, 1.0, 2.0, 0.0, 0.0), n_max).unwrap();
        let rho0 = DensityMatrix::basis(qubit_fock(n_max), &[0, 0]);
        let grid = uniform_grid(0.5, 0.05).unwrap();
        let err = evolve(&gen, &rho0, &grid, &SolverOptions::default(), &[]).unwrap_err();
        assert!(matches!(err, Error::Truncation(ref m) if m.contains("t = ")), "{err}");
        let ok = evolve(&gen, &rho0, &grid, &SolverOptions::default().with_fock_guard(false), &[]);
        assert!(ok.is_ok());
    }

    #[test]
    fn rk4_and_rk45_agree() {
        let n_max = 20;
        let gen = build_effective(&EffectiveParams::new(1.0, 1.0, 0.5, -0.2, 0.1), n_max).unwrap();
        let rho0 = DensityMatrix::basis(qubit_fock(n_max), &[1, 0]);
        let grid = uniform_grid(1.0, 0.25).unwrap();
        let probes = [Probe::expectation("n", photon_number(n_max))];
        let a = evolve(&gen, &rho0, &grid, &SolverOptions::fixed(1e-3), &probes).unwrap();
        let b = evolve(&gen, &rho0, &grid, &SolverOptions::adaptive(1e-10, 1e-12), &probes).unwrap();
        for (x, y) in a.get("n").unwrap().iter().zip(b.get("n").unwrap()) {
            assert!((x - y).abs() < 1e-8, "{x} {y}");
        }
    }

    #[test]
    fn rejects_bad_options_and_layouts() {
        let gen = build_effective(&EffectiveParams::new(1.0, 1.0, 0.5, 0.0, 0.1), 5).unwrap();
        let rho0 = DensityMatrix::basis(qubit_fock(5), &[0, 0]);
        let grid = [0.0, 1.0];
        assert!(evolve(&gen, &rho0, &grid, &SolverOptions::fixed(0.0), &[]).is_err());
        assert!(evolve(&gen, &rho0, &grid, &SolverOptions::adaptive(1e-14, 1e-12), &[]).is_err());
        let other = DensityMatrix::basis(qubit_fock(6), &[0, 0]);
        assert!(matches!(evolve(&gen, &other, &grid, &SolverOptions::default(), &[]), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|t| 1.0 - 0.25 * t).collect();
        let (s, c, r) = linear_fit(&x, &y);
        assert!((s + 0.25).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn leakage_fit_recovers_cavity_decay() {
        let n = 4;
        let layout = qubit_fock(n);
        let occupied = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| {
            C64::new(if i % n == 0 { 0.0 } else { 1.0 }, 0.0)
        }));
        let projector = Operator::from_dense(layout.clone(), occupied).unwrap();
        let rho0 = DensityMatrix::basis(layout, &[1, 1]);
        let opts = SolverOptions::adaptive(1e-11, 1e-13);
        let kappa = 1e-4;
        let gen = build_effective(&EffectiveParams::new(0.0, 1.0, 0.0, 0.0, kappa), n).unwrap();
        let fit = leakage_probe(&gen, &rho0, 1.0, &projector, 10, &opts).unwrap();
        let exact = 4.0 * PI * kappa;
        assert!((fit.rate / exact - 1.0).abs() < 1e-3, "{} vs {exact}", fit.rate);
        let closed = build_effective(&EffectiveParams::new(0.0, 1.0, 0.0, 0.0, 0.0), n).unwrap();
        assert!(leakage_probe(&closed, &rho0, 1.0, &projector, 10, &opts).unwrap().rate.abs() < 1e-12);
        assert!(leakage_probe(&closed, &rho0, 1.0, &projector, 1, &opts).is_err());
    }

    #[test]
    fn par_map_preserves_order() {
        let v: Vec<u32> = (0..50).collect();
        assert_eq!(par_map(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
