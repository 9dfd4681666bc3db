//! Observables of qubit ⊗ cavity and cavity-only states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_amplitudes, fock_ops, linalg, partial_trace, partial_transpose, DensityMatrix, Operator, SpaceLayout,
    CAVITY, QUBIT, ZERO,
};

fn qubit_fock_dims(layout: &SpaceLayout) -> Result<usize> {
    match layout.factors() {
        [(q, 2), (c, n)] if q == QUBIT && c == CAVITY => Ok(*n),
        other => Err(Error::LayoutMismatch(format!("expected qubit (x) cavity, got {other:?}"))),
    }
}

/// `a^dag a` on the cavity factor of `layout`.
pub fn photon_number_operator(layout: &SpaceLayout) -> Result<Operator> {
    let (_, n) = fock_ops(layout.dim_of(CAVITY)?)?;
    n.embed(layout, CAVITY)
}

/// `<psi0|rho|psi0>` with `psi0` normalized.
pub fn survival_probability(rho: &DensityMatrix, psi0: &DVector<C64>) -> Result<f64> {
    if psi0.len() != rho.dim() {
        return Err(Error::LayoutMismatch(format!("state of dimension {} vs {}", psi0.len(), rho.dim())));
    }
    let norm2 = psi0.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::InvalidDimension("zero reference state".into()));
    }
    Ok((psi0.adjoint() * rho.matrix() * psi0)[(0, 0)].re / norm2)
}

fn photon_distribution(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let cav = if rho.layout().factors().len() == 1 { rho.clone() } else { partial_trace(rho, CAVITY)? };
    if cav.layout().factors()[0].0 != CAVITY {
        return Err(Error::UnknownFactor(CAVITY.into()));
    }
    Ok((0..cav.dim()).map(|k| cav.matrix()[(k, k)].re).collect())
}

pub fn mean_photon_number(rho: &DensityMatrix) -> Result<f64> {
    Ok(photon_distribution(rho)?.iter().enumerate().map(|(k, p)| k as f64 * p).sum())
}

/// `<a^dag a^dag a a> / <a^dag a>^2`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let p = photon_distribution(rho)?;
    let n: f64 = p.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    if n < 1e-9 {
        return Err(Error::UndefinedCorrelation(format!("mean photon number {n:.3e} is too small")));
    }
    let nn: f64 = p.iter().enumerate().map(|(k, p)| (k * k.saturating_sub(1)) as f64 * p).sum();
    Ok(nn / (n * n))
}

/// `tr(Pi rho)` with `Pi = -sigma_z (-1)^{a^dag a}`.
pub fn parity_expectation(rho: &DensityMatrix) -> Result<f64> {
    let n = qubit_fock_dims(rho.layout())?;
    let mut s = 0.0;
    for q in 0..2 {
        let sz = if q == 1 { 1.0 } else { -1.0 };
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s -= sz * sign * rho.matrix()[(q * n + k, q * n + k)].re;
        }
    }
    Ok(s)
}

/// `log2 ||rho^{T_part}||_1`.
pub fn log_negativity(rho: &DensityMatrix, part: &str) -> Result<f64> {
    if rho.layout().factors().len() < 2 {
        return Err(Error::LayoutMismatch("log negativity needs a bipartite state".into()));
    }
    let pt = partial_transpose(rho, part)?;
    let norm = linalg::trace_norm_hermitian(&pt.to_dense());
    if !norm.is_finite() {
        return Err(Error::Singular("partial transpose spectrum is not finite".into()));
    }
    Ok(norm.log2().max(0.0))
}

/// Parity `Pi` of a qubit-cavity cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatParity {
    /// `{|e>(|a> - |-a>) + |g>(|a> + |-a>)} / 2`, reached from `|g0>`.
    Even,
    /// `{|e>(|a> + |-a>) - |g>(|a> - |-a>)} / 2`.
    Odd,
}

/// Cat state on qubit ⊗ Fock(`n_max`), normalized in the truncated space.
pub fn cat_state(alpha: C64, n_max: usize, parity: CatParity) -> DVector<C64> {
    let plus = coherent_amplitudes(alpha, n_max);
    let minus = coherent_amplitudes(-alpha, n_max);
    let mut psi = DVector::from_element(2 * n_max, ZERO);
    for k in 0..n_max {
        let even = plus[k] + minus[k];
        let odd = plus[k] - minus[k];
        let (e, g) = match parity {
            CatParity::Even => (odd, even),
            CatParity::Odd => (even, -odd),
        };
        psi[n_max + k] = e;
        psi[k] = g;
    }
    let norm = psi.norm();
    if norm > 0.0 {
        psi /= C64::new(norm, 0.0);
    }
    psi
}

/// Fidelity with the odd-parity cat `{|e>(|a> + |-a>) - |g>(|a> - |-a>)} / 2`.
pub fn cat_fidelity(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    cat_fidelity_with_parity(rho, alpha, CatParity::Odd)
}

pub fn cat_fidelity_with_parity(rho: &DensityMatrix, alpha: C64, parity: CatParity) -> Result<f64> {
    let n = qubit_fock_dims(rho.layout())?;
    if alpha == ZERO && parity == CatParity::Odd {
        // |a> - |-a> vanishes; the limit is |e0>.
        return Ok(rho.matrix()[(n, n)].re);
    }
    if alpha == ZERO {
        return Ok(rho.matrix()[(0, 0)].re);
    }
    survival_probability(rho, &cat_state(alpha, n, parity))
}

/// Best cat fidelity over `|alpha|` on `radial_points` values in
/// `[0, max_radius]` with the phase of `alpha` set by `arg <a^2> / 2` and its
/// opposite. Returns the fidelity and the maximizing `alpha`.
pub fn best_cat_fidelity(
    rho: &DensityMatrix,
    parity: CatParity,
    radial_points: usize,
    max_radius: f64,
) -> Result<(f64, C64)> {
    let n = qubit_fock_dims(rho.layout())?;
    let (a, _) = fock_ops(n)?;
    let a2 = a.matmul(&a)?.embed(rho.layout(), CAVITY)?;
    let phase = rho.expect(&a2)?.arg() / 2.0;
    let mut best = (f64::NEG_INFINITY, ZERO);
    for i in 0..radial_points.max(2) {
        let r = max_radius * i as f64 / (radial_points.max(2) - 1) as f64;
        for shift in [0.0, PI] {
            let alpha = C64::from_polar(r, phase + shift);
            let f = cat_fidelity_with_parity(rho, alpha, parity)?;
            if f > best.0 {
                best = (f, alpha);
            }
        }
    }
    Ok(best)
}

/// Rectangular grid in `x, y` with `alpha = (x + i y) / sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_min: -6.0, x_max: 6.0, nx: 121, y_min: -6.0, y_max: 6.0, ny: 121 }
    }
}

impl GridSpec {
    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }
}

/// Wigner function samples; `values[(iy, ix)]` belongs to `(x_axis[ix], y_axis[iy])`.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    fn spacing(axis: &[f64]) -> f64 {
        if axis.len() > 1 {
            axis[1] - axis[0]
        } else {
            1.0
        }
    }

    /// Riemann sum of `W d^2 alpha` with `d^2 alpha = dx dy / 2`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * Self::spacing(&self.x_axis) * Self::spacing(&self.y_axis) / 2.0
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Interior points strictly above their eight neighbours and above
    /// `fraction` of the global maximum, as `(x, y, W)`.
    pub fn local_maxima(&self, fraction: f64) -> Vec<(f64, f64, f64)> {
        let (ny, nx) = self.values.shape();
        let floor = fraction * self.max();
        let mut out = Vec::new();
        for iy in 1..ny.saturating_sub(1) {
            for ix in 1..nx.saturating_sub(1) {
                let v = self.values[(iy, ix)];
                if v <= floor {
                    continue;
                }
                let peak = (iy - 1..=iy + 1)
                    .flat_map(|j| (ix - 1..=ix + 1).map(move |i| (j, i)))
                    .filter(|&(j, i)| (j, i) != (iy, ix))
                    .all(|(j, i)| self.values[(j, i)] < v);
                if peak {
                    out.push((self.x_axis[ix], self.y_axis[iy], v));
                }
            }
        }
        out
    }
}

/// `W(alpha) = (2/pi) tr[D^dag(alpha) rho D(alpha) (-1)^{a^dag a}]` at one point.
///
/// Uses `D(alpha) P D^dag(alpha) = D(2 alpha) P` and the three-term
/// recurrence of the matrix elements `<m| D(2 alpha) P |n>`, which are exact in
/// the untruncated space.
fn wigner_point(rho: &DMatrix<C64>, alpha: C64, work: &mut [C64]) -> f64 {
    let n = rho.nrows();
    let two_a = 2.0 * alpha;
    let two_ac = two_a.conj();
    work[0] = C64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut w = rho[(0, 0)].re * work[0].re;
    for k in 1..n {
        work[k] = two_a * work[k - 1] / (k as f64).sqrt();
        w += 2.0 * (rho[(0, k)] * work[k]).re;
    }
    for m in 1..n {
        let sm = (m as f64).sqrt();
        let mut temp = work[m];
        work[m] = (two_ac * temp - sm * work[m - 1]) / sm;
        w += (rho[(m, m)] * work[m]).re;
        for k in m + 1..n {
            let next = (two_a * work[k - 1] - sm * temp) / (k as f64).sqrt();
            temp = work[k];
            work[k] = next;
            w += 2.0 * (rho[(m, k)] * work[k]).re;
        }
    }
    2.0 * w
}

/// Wigner function of a cavity-only state on `spec`.
pub fn wigner(rho_cav: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    match rho_cav.layout().factors() {
        [(c, _)] if c == CAVITY => {}
        other => return Err(Error::LayoutMismatch(format!("wigner needs a cavity-only state, got {other:?}"))),
    }
    if spec.nx == 0 || spec.ny == 0 {
        return Err(Error::InvalidOptions("empty Wigner grid".into()));
    }
    let n = rho_cav.dim();
    let x_axis = GridSpec::axis(spec.x_min, spec.x_max, spec.nx);
    let y_axis = GridSpec::axis(spec.y_min, spec.y_max, spec.ny);
    let reach = x_axis.iter().map(|x| x * x).fold(0.0, f64::max) + y_axis.iter().map(|y| y * y).fold(0.0, f64::max);
    if reach / 2.0 > n as f64 {
        log::warn!("Wigner grid reaches |alpha|^2 = {:.1} beyond the cutoff {n}", reach / 2.0);
    }
    let rho = rho_cav.matrix();
    let rows: Vec<Vec<f64>> = y_axis
        .par_iter()
        .map(|&y| {
            let mut work = vec![ZERO; n];
            x_axis.iter().map(|&x| wigner_point(rho, C64::new(x, y) * FRAC_1_SQRT_2, &mut work)).collect()
        })
        .collect();
    let values = DMatrix::from_fn(y_axis.len(), x_axis.len(), |iy, ix| rows[iy][ix]);
    Ok(WignerGrid { x_axis, y_axis, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, displacement, qubit_ops, tensor};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cavity(n: usize) -> SpaceLayout {
        SpaceLayout::single(CAVITY, n)
    }

    fn qf(n: usize) -> SpaceLayout {
        SpaceLayout::new([(QUBIT, 2), (CAVITY, n)]).unwrap()
    }

    fn coherent(alpha: C64, n: usize) -> DensityMatrix {
        DensityMatrix::pure(cavity(n), &DVector::from_vec(coherent_amplitudes(alpha, n))).unwrap()
    }

    fn thermal(nbar: f64, n: usize) -> DensityMatrix {
        let q = nbar / (1.0 + nbar);
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = C64::new((1.0 - q) * q.powi(k as i32), 0.0);
        }
        let mut rho = DensityMatrix::from_matrix(cavity(n), m).unwrap();
        rho.normalize();
        rho
    }

    #[test]
    fn survival_edge_cases() {
        let l = qf(4);
        let rho = DensityMatrix::basis(l.clone(), &[1, 0]);
        assert_abs_diff_eq!(survival_probability(&rho, &basis_state(&l, &[1, 0])).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(survival_probability(&rho, &basis_state(&l, &[0, 0])).unwrap(), 0.0, epsilon = 1e-15);
        assert!(survival_probability(&rho, &DVector::from_element(3, ZERO)).is_err());
    }

    #[test]
    fn g2_of_reference_states() {
        assert_abs_diff_eq!(g2_zero(&coherent(C64::new(1.5, 0.3), 40)).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g2_zero(&DensityMatrix::basis(cavity(5), &[1])).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g2_zero(&thermal(2.0, 200)).unwrap(), 2.0, epsilon = 1e-6);
        assert!(matches!(g2_zero(&DensityMatrix::basis(cavity(5), &[0])), Err(Error::UndefinedCorrelation(_))));
        let joint = DensityMatrix::basis(qf(5), &[1, 2]);
        assert_abs_diff_eq!(g2_zero(&joint).unwrap(), 0.5, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn g2_of_coherent_mixtures_is_classical(
            a in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.05f64..1.0), 1..4)
        ) {
            let n = 40;
            let total: f64 = a.iter().map(|t| t.2).sum();
            let mut m = DMatrix::zeros(n, n);
            for &(x, y, w) in &a {
                m += coherent(C64::new(x, y), n).into_matrix() * C64::new(w / total, 0.0);
            }
            let rho = DensityMatrix::from_matrix(cavity(n), m).unwrap();
            if mean_photon_number(&rho).unwrap() > 1e-3 {
                prop_assert!(g2_zero(&rho).unwrap() >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn parity_of_basis_states() {
        let l = qf(4);
        assert_eq!(parity_expectation(&DensityMatrix::basis(l.clone(), &[0, 0])).unwrap(), 1.0);
        assert_eq!(parity_expectation(&DensityMatrix::basis(l.clone(), &[1, 0])).unwrap(), -1.0);
        assert_eq!(parity_expectation(&DensityMatrix::basis(l, &[1, 3])).unwrap(), 1.0);
        assert!(parity_expectation(&DensityMatrix::basis(cavity(3), &[0])).is_err());
    }

    #[test]
    fn cat_states_carry_their_parity() {
        let n = 30;
        for (parity, expected) in [(CatParity::Even, 1.0), (CatParity::Odd, -1.0)] {
            let psi = cat_state(C64::new(1.3, -0.4), n, parity);
            let rho = DensityMatrix::pure(qf(n), &psi).unwrap();
            assert_abs_diff_eq!(parity_expectation(&rho).unwrap(), expected, epsilon = 1e-12);
            assert_abs_diff_eq!(cat_fidelity_with_parity(&rho, C64::new(1.3, -0.4), parity).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cat_fidelity_against_vacuum() {
        let n = 30;
        let alpha = C64::new(2.0, 0.0);
        let rho = DensityMatrix::basis(qf(n), &[0, 0]);
        assert_abs_diff_eq!(cat_fidelity(&rho, alpha).unwrap(), 0.0, epsilon = 1e-12);
        let e0 = DensityMatrix::basis(qf(n), &[1, 0]);
        let expected = (-4.0f64).exp();
        assert_abs_diff_eq!(cat_fidelity(&e0, alpha).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn best_cat_fidelity_finds_exact_cat() {
        let n = 40;
        let alpha = C64::from_polar(2.5, 0.7);
        let rho = DensityMatrix::pure(qf(n), &cat_state(alpha, n, CatParity::Even)).unwrap();
        let (f, best) = best_cat_fidelity(&rho, CatParity::Even, 41, 4.0).unwrap();
        assert!(f > 0.99, "{f} at {best}");
    }

    #[test]
    fn log_negativity_reference_values() {
        let l = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        let mut bell = DVector::from_element(4, ZERO);
        bell[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        bell[3] = C64::new(FRAC_1_SQRT_2, 0.0);
        let rho = DensityMatrix::pure(l.clone(), &bell).unwrap();
        assert_abs_diff_eq!(log_negativity(&rho, "a").unwrap(), 1.0, epsilon = 1e-10);
        let product = DensityMatrix::basis(l, &[1, 0]);
        assert_abs_diff_eq!(log_negativity(&product, "b").unwrap(), 0.0, epsilon = 1e-10);
        let cat = DensityMatrix::pure(qf(60), &cat_state(C64::new(4.0, 0.0), 60, CatParity::Odd)).unwrap();
        assert_abs_diff_eq!(log_negativity(&cat, CAVITY).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn log_negativity_survives_a_large_cutoff() {
        use crate::dynamics::{evolve, SolverOptions};
        use crate::models::{build_effective, EffectiveParams};
        // The evolved Fock tail holds entries down to 1e-155.
        let mut values = Vec::new();
        for n in [40, 100] {
            let gen = build_effective(&EffectiveParams::new(0.0, 1.0, 2.0, -0.18, 0.1), n).unwrap();
            let rho0 = DensityMatrix::basis(gen.layout().clone(), &[0, 0]);
            let opts = SolverOptions::default().with_snapshots(true);
            let traj = evolve(&gen, &rho0, &[0.0, 0.03], &opts, &[]).unwrap();
            values.push(log_negativity(&traj.snapshots[1].1, CAVITY).unwrap());
        }
        assert!(values[0] > 0.5, "{values:?}");
        assert_abs_diff_eq!(values[0], values[1], epsilon = 1e-8);
    }

    #[test]
    fn log_negativity_ignores_local_unitaries() {
        let n = 6;
        let psi = cat_state(C64::new(0.8, 0.2), n, CatParity::Even);
        let rho = DensityMatrix::pure(qf(n), &psi).unwrap();
        let (sz, sp) = qubit_ops();
        let gen = sp.add(&sp.adjoint()).unwrap().scale(C64::new(0.0, 0.37)).add(&sz.scale(C64::new(0.0, 1.1))).unwrap();
        let uq = gen.expm_antihermitian().unwrap();
        let ua = displacement(C64::new(0.3, -0.2), n, true).unwrap();
        let u = tensor(&[&uq, &ua]).to_dense();
        let rotated = DensityMatrix::from_matrix(qf(n), &u * rho.matrix() * u.adjoint()).unwrap();
        let before = log_negativity(&rho, QUBIT).unwrap();
        let after = log_negativity(&rotated, QUBIT).unwrap();
        assert!((before - after).abs() < 1e-8, "{before} {after}");
    }

    #[test]
    fn wigner_of_vacuum_and_coherent_state() {
        let spec = GridSpec { x_min: -3.0, x_max: 3.0, nx: 13, y_min: -3.0, y_max: 3.0, ny: 13 };
        let vac = DensityMatrix::basis(cavity(10), &[0]);
        let w = wigner(&vac, &spec).unwrap();
        assert_abs_diff_eq!(w.values[(6, 6)], 2.0 / PI, epsilon = 1e-8);
        let a0 = C64::new(0.7, -0.4);
        let coh = coherent(a0, 40);
        let w = wigner(&coh, &spec).unwrap();
        for (iy, y) in w.y_axis.iter().enumerate() {
            for (ix, x) in w.x_axis.iter().enumerate() {
                let a = C64::new(*x, *y) * FRAC_1_SQRT_2;
                let exact = 2.0 / PI * (-2.0 * (a - a0).norm_sqr()).exp();
                assert!((w.values[(iy, ix)] - exact).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn wigner_matches_displacement_definition() {
        let n = 12;
        let rho = thermal(0.6, n);
        let mut m = rho.matrix().clone();
        m[(0, 2)] = C64::new(0.05, 0.02);
        m[(2, 0)] = m[(0, 2)].conj();
        let rho = DensityMatrix::from_matrix(cavity(n), m).unwrap();
        let spec = GridSpec { x_min: -1.0, x_max: 1.0, nx: 3, y_min: -0.5, y_max: 0.5, ny: 3 };
        let w = wigner(&rho, &spec).unwrap();
        let big = 80;
        let mut padded = DMatrix::zeros(big, big);
        padded.view_mut((0, 0), (n, n)).copy_from(rho.matrix());
        let parity = DMatrix::from_fn(big, big, |r, c| if r == c { C64::new(if r % 2 == 0 { 1.0 } else { -1.0 }, 0.0) } else { ZERO });
        for (iy, y) in w.y_axis.iter().enumerate() {
            for (ix, x) in w.x_axis.iter().enumerate() {
                let d = displacement(C64::new(*x, *y) * FRAC_1_SQRT_2, big, false).unwrap().to_dense();
                let literal = 2.0 / PI * (d.adjoint() * &padded * &d * &parity).trace().re;
                assert!((literal - w.values[(iy, ix)]).abs() < 1e-10, "{literal} {}", w.values[(iy, ix)]);
            }
        }
    }

    #[test]
    fn wigner_normalization_and_peaks() {
        let n = 40;
        let psi = DVector::from_vec(
            coherent_amplitudes(C64::new(2.0, 0.0), n)
                .iter()
                .zip(coherent_amplitudes(C64::new(-2.0, 0.0), n))
                .map(|(a, b)| a + b)
                .collect(),
        );
        let mixed = {
            let pure = DensityMatrix::pure(cavity(n), &psi).unwrap();
            let dephased = DMatrix::from_fn(n, n, |r, c| if (r + c) % 2 == 0 { pure.matrix()[(r, c)] } else { ZERO });
            DensityMatrix::from_matrix(cavity(n), dephased).unwrap()
        };
        let w = wigner(&mixed, &GridSpec::default()).unwrap();
        assert!((w.integral() - 1.0).abs() < 0.03, "{}", w.integral());
        let peaks = w.local_maxima(0.1);
        assert!(peaks.len() >= 2, "{peaks:?}");
        assert!(wigner(&DensityMatrix::basis(qf(3), &[0, 0]), &GridSpec::default()).is_err());
    }

    #[test]
    fn photon_number_operator_embeds() {
        let l = qf(5);
        let op = photon_number_operator(&l).unwrap();
        let rho = DensityMatrix::basis(l, &[1, 3]);
        assert_abs_diff_eq!(rho.expect(&op).unwrap().re, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean_photon_number(&rho).unwrap(), 3.0, epsilon = 1e-15);
    }
}
