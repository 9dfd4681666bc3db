//! Factorized mean-field model for `alpha = <a>`, `beta = <sigma_->` and
//! `w = <sigma_z>`:
//!
//! ```text
//! alpha' = -i (omega - i kappa + U w / 2) alpha - i g (beta + beta^*)
//! beta'  = -i (omega0 + U |alpha|^2) beta + i g (alpha + alpha^*) w
//! w'     = 2 i g (alpha + alpha^*)(beta - beta^*)
//! ```
//!
//! with every rate multiplied by 2π. Stability is analysed in the real
//! coordinates `(Re alpha, Im alpha, Re beta, Im beta, w)`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64 as C64;

use crate::dynamics::ode::{integrate_adaptive, AdaptiveOptions};
use crate::error::{Error, Result};
use crate::hilbert::linalg;

pub type Jacobian = SMatrix<f64, 5, 5>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiState {
    pub alpha: C64,
    pub beta: C64,
    pub w: f64,
}

impl SemiState {
    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im, self.w]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self { alpha: C64::new(v[0], v[1]), beta: C64::new(v[2], v[3]), w: v[4] }
    }

    /// `|2 beta|^2 + w^2`, equal to one on the Bloch sphere.
    pub fn spin_length(&self) -> f64 {
        4.0 * self.beta.norm_sqr() + self.w * self.w
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Rates in MHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub u: f64,
    pub kappa: f64,
}

impl SemiParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.omega, self.omega0, self.g, self.u, self.kappa];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain(format!("non-finite semiclassical parameters {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPoint {
    /// `w = -1`, `alpha = beta = 0`.
    Normal,
    /// `w = +1`, `alpha = beta = 0`.
    Inverted,
}

impl FixedPoint {
    pub fn state(self) -> SemiState {
        let w = match self {
            FixedPoint::Normal => -1.0,
            FixedPoint::Inverted => 1.0,
        };
        SemiState { alpha: C64::new(0.0, 0.0), beta: C64::new(0.0, 0.0), w }
    }
}

fn rhs_array(s: &[f64], p: &SemiParams, out: &mut [f64]) {
    let [ar, ai, br, bi, w] = [s[0], s[1], s[2], s[3], s[4]];
    let field = p.omega + 0.5 * p.u * w;
    let spin = p.omega0 + p.u * (ar * ar + ai * ai);
    out[0] = TAU * (field * ai - p.kappa * ar);
    out[1] = TAU * (-field * ar - p.kappa * ai - 2.0 * p.g * br);
    out[2] = TAU * (spin * bi);
    out[3] = TAU * (-spin * br + 2.0 * p.g * ar * w);
    out[4] = TAU * (-8.0 * p.g * ar * bi);
}

/// Time derivative of `s`, in 1/μs.
pub fn semi_rhs(s: &SemiState, p: &SemiParams) -> SemiState {
    let mut out = [0.0; 5];
    rhs_array(&s.to_array(), p, &mut out);
    SemiState::from_slice(&out)
}

/// Analytic Jacobian of [`semi_rhs`] in `(Re alpha, Im alpha, Re beta, Im beta, w)`.
pub fn jacobian(s: &SemiState, p: &SemiParams) -> Jacobian {
    let [ar, ai, br, bi, w] = s.to_array();
    let field = p.omega + 0.5 * p.u * w;
    let spin = p.omega0 + p.u * (ar * ar + ai * ai);
    let (g, u, k) = (p.g, p.u, p.kappa);
    #[rustfmt::skip]
    let j = Jacobian::from_row_slice(&[
        -k,                           field,             0.0,     0.0,           0.5 * u * ai,
        -field,                       -k,                -2.0 * g, 0.0,          -0.5 * u * ar,
        2.0 * u * ar * bi,            2.0 * u * ai * bi, 0.0,     spin,          0.0,
        -2.0 * u * ar * br + 2.0 * g * w, -2.0 * u * ai * br, -spin, 0.0,        2.0 * g * ar,
        -8.0 * g * bi,                0.0,               0.0,     -8.0 * g * ar, 0.0,
    ]);
    j * TAU
}

/// Eigenvalues of the full 5×5 Jacobian at a fixed point.
pub fn fixed_point_spectrum(p: &SemiParams, which: FixedPoint) -> Vec<C64> {
    let j = jacobian(&which.state(), p);
    linalg::eigvals_general(&DMatrix::from_fn(5, 5, |r, c| j[(r, c)]))
}

/// Largest real part among the eigenvalues transverse to the spin-length
/// constraint (the `w` direction is a zero mode at both fixed points).
pub fn fixed_point_stability(p: &SemiParams, which: FixedPoint) -> f64 {
    let j = jacobian(&which.state(), p);
    let transverse = DMatrix::from_fn(4, 4, |r, c| j[(r, c)]);
    linalg::eigvals_general(&transverse).iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Integrates from `s0` and samples at `t_grid` (μs) with RK45 at rtol 1e-10.
pub fn semi_integrate(s0: &SemiState, p: &SemiParams, t_grid: &[f64]) -> Result<Vec<SemiState>> {
    let opts = AdaptiveOptions { rtol: 1e-10, atol: 1e-12, ..AdaptiveOptions::default() };
    semi_integrate_with(s0, p, t_grid, &opts)
}

pub fn semi_integrate_with(
    s0: &SemiState,
    p: &SemiParams,
    t_grid: &[f64],
    opts: &AdaptiveOptions,
) -> Result<Vec<SemiState>> {
    p.validate()?;
    let mut y = s0.to_array().to_vec();
    let mut out = Vec::with_capacity(t_grid.len());
    integrate_adaptive(
        |_, y: &[f64], dy: &mut [f64]| rhs_array(y, p, dy),
        &mut y,
        t_grid,
        opts,
        |_| {},
        |_, _, y| {
            out.push(SemiState::from_slice(y));
            Ok(())
        },
    )?;
    Ok(out)
}

/// A bracket `[lo, hi]` around a sign change of the stability measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub lo: f64,
    pub hi: f64,
}

impl Crossing {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Values below this count as stable; the spin sector is undamped, so
/// marginal modes sit at zero up to rounding.
const STABILITY_EPS: f64 = 1e-9;

/// Scans `U` over `[u_from, u_to]` in `samples` steps for the first change
/// of stability of `which`, then bisects to a bracket narrower than 1e-3 MHz.
pub fn stability_scan(
    template: &SemiParams,
    u_from: f64,
    u_to: f64,
    samples: usize,
    which: FixedPoint,
) -> Option<Crossing> {
    let unstable = |u: f64| fixed_point_stability(&SemiParams { u, ..*template }, which) > STABILITY_EPS;
    let samples = samples.max(2);
    let us: Vec<f64> = (0..samples).map(|k| u_from + (u_to - u_from) * k as f64 / (samples - 1) as f64).collect();
    let (mut lo, mut hi) = us.windows(2).map(|w| (w[0], w[1])).find(|&(a, b)| unstable(a) != unstable(b))?;
    let lo_state = unstable(lo);
    while (hi - lo).abs() > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) == lo_state {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(Crossing { lo: lo.min(hi), hi: lo.max(hi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fig7(u: f64) -> SemiParams {
        SemiParams { omega: 1.0, omega0: 1.0, g: 2.0, u, kappa: 0.2 }
    }

    fn fd_jacobian(s: &SemiState, p: &SemiParams) -> Jacobian {
        let x = s.to_array();
        let mut j = Jacobian::zeros();
        for c in 0..5 {
            let h = 1e-6 * x[c].abs().max(1.0);
            let (mut xp, mut xm) = (x, x);
            xp[c] += h;
            xm[c] -= h;
            let fp = semi_rhs(&SemiState::from_slice(&xp), p).to_array();
            let fm = semi_rhs(&SemiState::from_slice(&xm), p).to_array();
            for r in 0..5 {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    proptest! {
        #[test]
        fn fixed_points_are_exact_zeros(
            omega in -3.0f64..3.0, omega0 in -3.0f64..3.0, g in 0.0f64..3.0, u in -4.0f64..4.0, kappa in 0.0f64..1.0
        ) {
            let p = SemiParams { omega, omega0, g, u, kappa };
            for fp in [FixedPoint::Normal, FixedPoint::Inverted] {
                prop_assert_eq!(semi_rhs(&fp.state(), &p).norm(), 0.0);
            }
        }

        #[test]
        fn jacobian_matches_finite_differences(
            v in proptest::array::uniform5(-1.0f64..1.0), g in 0.1f64..3.0, u in -4.0f64..4.0, kappa in 0.0f64..1.0
        ) {
            let p = SemiParams { omega: 1.0, omega0: 0.7, g, u, kappa };
            let s = SemiState::from_slice(&v);
            let a = jacobian(&s, &p);
            let b = fd_jacobian(&s, &p);
            prop_assert!((a - b).norm() <= 1e-6 * a.norm());
        }
    }

    #[test]
    fn free_field_decays_at_cavity_rate() {
        let p = SemiParams { omega: 1.0, omega0: 0.5, g: 0.0, u: 0.4, kappa: 0.3 };
        let s0 = SemiState { alpha: C64::new(1.0, 0.0), beta: C64::new(0.0, 0.0), w: -1.0 };
        let grid: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
        let out = semi_integrate(&s0, &p, &grid).unwrap();
        for (t, s) in grid.iter().zip(&out) {
            let exact = C64::new(-TAU * p.kappa * t, -TAU * (p.omega - 0.5 * p.u) * t).exp();
            assert!((s.alpha - exact).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn uncoupled_spectrum() {
        let p = SemiParams { omega: 1.0, omega0: 1.3, g: 0.0, u: 0.0, kappa: 0.2 };
        let re: Vec<f64> = fixed_point_spectrum(&p, FixedPoint::Normal).iter().map(|l| l.re).collect();
        assert_eq!(re.iter().filter(|x| (*x + TAU * 0.2).abs() < 1e-12).count(), 2);
        assert_eq!(re.iter().filter(|x| x.abs() < 1e-12).count(), 3);
        assert_abs_diff_eq!(fixed_point_stability(&p, FixedPoint::Normal), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn normal_state_is_stationary() {
        let grid: Vec<f64> = (0..=10).map(|k| 10.0 * k as f64).collect();
        let out = semi_integrate(&FixedPoint::Normal.state(), &fig7(1.0), &grid).unwrap();
        assert!(out.iter().all(|s| (s.to_array()[4] + 1.0).abs() < 1e-10 && s.alpha.norm() < 1e-10));
    }

    #[test]
    fn spin_length_is_conserved() {
        let p = SemiParams { omega: 1.0, omega0: 1.0, g: 0.7, u: -0.5, kappa: 0.0 };
        let th: f64 = 0.4;
        let s0 = SemiState { alpha: C64::new(0.3, -0.1), beta: C64::new(0.5 * th.sin(), 0.0), w: -th.cos() };
        let grid: Vec<f64> = (0..=20).map(|k| 5.0 * k as f64).collect();
        let opts = AdaptiveOptions { rtol: 1e-11, atol: 1e-13, ..AdaptiveOptions::default() };
        let out = semi_integrate_with(&s0, &p, &grid, &opts).unwrap();
        for s in &out {
            assert!((s.spin_length() - 1.0).abs() < 1e-8, "{}", s.spin_length());
        }
    }

    #[test]
    fn crossings_bracket_twice_omega() {
        let normal = stability_scan(&fig7(0.0), 1.0, 3.0, 201, FixedPoint::Normal).unwrap();
        assert!(normal.width() <= 1e-3 && normal.lo >= 1.8 && normal.hi <= 2.2, "{normal:?}");
        let inverted = stability_scan(&fig7(0.0), -3.0, -1.0, 201, FixedPoint::Inverted).unwrap();
        assert!(inverted.width() <= 1e-3 && inverted.lo >= -2.2 && inverted.hi <= -1.8, "{inverted:?}");
    }

    #[test]
    fn weak_coupling_crossing_tends_to_twice_omega() {
        let p = SemiParams { omega: 1.0, omega0: 1.0, g: 0.02, u: 0.0, kappa: 0.2 };
        let c = stability_scan(&p, 1.0, 3.0, 201, FixedPoint::Normal).unwrap();
        assert!((c.midpoint() - 2.0).abs() < 0.01, "{c:?}");
    }

    #[test]
    fn strong_damping_stabilizes_normal_state() {
        let p = SemiParams { omega: 1.0, omega0: 1.0, g: 0.1, u: 0.0, kappa: 20.0 };
        assert!(fixed_point_stability(&p, FixedPoint::Normal) < 0.0);
        let s0 = SemiState { alpha: C64::new(0.5, 0.2), beta: C64::new(0.05, 0.0), w: -(1.0f64 - 0.01).sqrt() };
        let grid: Vec<f64> = (0..=20).map(|k| 10.0 * k as f64).collect();
        let out = semi_integrate(&s0, &p, &grid).unwrap();
        let dist = |s: &SemiState| (s.alpha.norm_sqr() + s.beta.norm_sqr()).sqrt();
        assert!(out[1].alpha.norm() < 1e-3);
        assert!(out.windows(2).skip(1).all(|w| dist(&w[1]) <= dist(&w[0]) * (1.0 + 1e-9)));
    }

    #[test]
    fn strong_nonlinearity_oscillates() {
        let s0 = SemiState { alpha: C64::new(0.1, 0.0), beta: C64::new(0.05, 0.0), w: -(1.0f64 - 0.01).sqrt() };
        let out = semi_integrate(&s0, &fig7(3.0), &[0.0, 200.0]).unwrap();
        assert!(semi_rhs(out.last().unwrap(), &fig7(3.0)).norm() > 1e-4);
    }
}
