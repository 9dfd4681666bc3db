//! Explicit Runge–Kutta integrators on flat state slices: classical RK4 with a
//! fixed step and Dormand–Prince 5(4) with step-size control.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Scalar field of an ODE state.
pub trait OdeScalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl OdeScalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for C64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step, `f64::INFINITY` for none.
    pub h_max: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 10_000_000, h_max: f64::INFINITY }
    }
}

impl AdaptiveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol >= 1e-12) || !(self.atol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "adaptive tolerances need rtol >= 1e-12 and atol > 0, got rtol = {}, atol = {}",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

/// Step counts from an integration run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidOptions("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidOptions("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `y += h * sum_i c_i k_i` into `out`.
fn combine<T: OdeScalar>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &Vec<T>)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::default();
        for &(c, k) in terms {
            if c != 0.0 {
                acc = acc + k[i] * c;
            }
        }
        *o = y[i] + acc * h;
    }
}

/// Classical RK4 with at most `dt_max` per step; each grid interval is split
/// into equal steps so that samples land exactly on the grid.
///
/// `post_step` runs after every step, `observe` at every grid time (the
/// initial one included).
pub fn integrate_rk4<T, F, P, O>(
    mut f: F,
    y: &mut [T],
    t_grid: &[f64],
    dt_max: f64,
    mut post_step: P,
    mut observe: O,
) -> Result<OdeStats>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
    P: FnMut(&mut [T]),
    O: FnMut(usize, f64, &[T]) -> Result<()>,
{
    check_grid(t_grid)?;
    if !(dt_max > 0.0) {
        return Err(Error::InvalidOptions(format!("fixed step must be positive, got {dt_max}")));
    }
    let n = y.len();
    let mut k1 = vec![T::default(); n];
    let mut k2 = vec![T::default(); n];
    let mut k3 = vec![T::default(); n];
    let mut k4 = vec![T::default(); n];
    let mut tmp = vec![T::default(); n];
    let mut stats = OdeStats::default();

    observe(0, t_grid[0], y)?;
    for (idx, w) in t_grid.windows(2).enumerate() {
        let span = w[1] - w[0];
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for s in 0..steps {
            let t = w[0] + s as f64 * h;
            f(t, y, &mut k1);
            combine(&mut tmp, y, 0.5 * h, &[(1.0, &k1)]);
            f(t + 0.5 * h, &tmp, &mut k2);
            combine(&mut tmp, y, 0.5 * h, &[(1.0, &k2)]);
            f(t + 0.5 * h, &tmp, &mut k3);
            combine(&mut tmp, y, h, &[(1.0, &k3)]);
            f(t + h, &tmp, &mut k4);
            for i in 0..n {
                y[i] = y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            post_step(y);
            stats.accepted += 1;
            stats.evaluations += 4;
        }
        observe(idx + 1, w[1], y)?;
    }
    Ok(stats)
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn weighted_rms<T: OdeScalar>(v: &[T], y0: &[T], y1: &[T], opts: &AdaptiveOptions) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.magnitude().max(b.magnitude());
            (e.magnitude() / sc).powi(2)
        })
        .sum();
    (s / v.len() as f64).sqrt()
}

/// Dormand–Prince 5(4) with an error-per-step controller. Steps are clipped
/// to land on every grid time; hooks behave as in [`integrate_rk4`].
pub fn integrate_adaptive<T, F, P, O>(
    mut f: F,
    y: &mut [T],
    t_grid: &[f64],
    opts: &AdaptiveOptions,
    mut post_step: P,
    mut observe: O,
) -> Result<OdeStats>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
    P: FnMut(&mut [T]),
    O: FnMut(usize, f64, &[T]) -> Result<()>,
{
    check_grid(t_grid)?;
    opts.validate()?;
    let n = y.len();
    let zeros = || vec![T::default(); n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zeros(), zeros(), zeros(), zeros(), zeros(), zeros(), zeros());
    let mut tmp = zeros();
    let mut y_new = zeros();
    let mut err = zeros();
    let mut stats = OdeStats::default();

    observe(0, t_grid[0], y)?;
    if t_grid.len() == 1 {
        return Ok(stats);
    }
    let mut t = t_grid[0];
    f(t, y, &mut k1);
    stats.evaluations += 1;

    // initial step from the scale of y and y'
    let d0 = weighted_rms(y, y, y, opts);
    let d1 = weighted_rms(&k1, y, y, opts);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(opts.h_max).min(t_grid[t_grid.len() - 1] - t);

    for (idx, &target) in t_grid.iter().enumerate().skip(1) {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::Stiffness(format!("step budget of {} exhausted at t = {t}", opts.max_steps)));
            }
            let remaining = target - t;
            let mut hs = h.min(opts.h_max);
            let last = hs >= remaining * (1.0 - 1e-12);
            if last {
                hs = remaining;
            }
            if hs <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Stiffness(format!("step size underflow (h = {hs:e}) at t = {t}")));
            }

            combine(&mut tmp, y, hs, &[(A21, &k1)]);
            f(t + C2 * hs, &tmp, &mut k2);
            combine(&mut tmp, y, hs, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * hs, &tmp, &mut k3);
            combine(&mut tmp, y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * hs, &tmp, &mut k4);
            combine(&mut tmp, y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + C5 * hs, &tmp, &mut k5);
            combine(&mut tmp, y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + hs, &tmp, &mut k6);
            combine(&mut y_new, y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + hs, &y_new, &mut k7);
            stats.evaluations += 6;

            for i in 0..n {
                err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            }
            let e = weighted_rms(&err, y, &y_new, opts);
            if !e.is_finite() {
                return Err(Error::Stiffness(format!("non-finite error estimate at t = {t}")));
            }
            let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            if e <= 1.0 {
                t = if last { target } else { t + hs };
                y.copy_from_slice(&y_new);
                post_step(y);
                std::mem::swap(&mut k1, &mut k7);
                stats.accepted += 1;
                // a clipped final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    h = hs * factor;
                }
            } else {
                h = hs * factor.min(1.0);
                stats.rejected += 1;
            }
        }
        observe(idx, target, y)?;
    }
    Ok(stats)
}
