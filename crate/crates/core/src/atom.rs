//! 87Rb D1 line: the 16 hyperfine sublevels of 5S1/2 and 5P1/2, dipole matrix
//! elements from angular-momentum recoupling, and the transition operators
//! `A_{FF'}^{(p)}`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{CsrMatrix, Operator, SpaceLayout, ATOM};

/// Number of atomic sublevels on the D1 line.
pub const N_LEVELS: usize = 16;

/// Electron angular momentum of both manifolds, doubled.
const TWO_J: i32 = 1;
/// Nuclear spin of 87Rb, doubled.
const TWO_I: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Manifold {
    /// 5²S₁/₂
    Ground,
    /// 5²P₁/₂
    Excited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AtomicLevel {
    pub manifold: Manifold,
    pub f: i32,
    pub m: i32,
}

impl AtomicLevel {
    pub fn ground(f: i32, m: i32) -> Self {
        Self { manifold: Manifold::Ground, f, m }
    }

    pub fn excited(f: i32, m: i32) -> Self {
        Self { manifold: Manifold::Excited, f, m }
    }

    /// Position in the 16-level atomic basis: ground F=1, ground F=2,
    /// excited F'=1, excited F'=2, each ordered by ascending m.
    pub fn index(&self) -> Option<usize> {
        if !(1..=2).contains(&self.f) || self.m.abs() > self.f {
            return None;
        }
        let block = match (self.manifold, self.f) {
            (Manifold::Ground, 1) => 0,
            (Manifold::Ground, _) => 3,
            (Manifold::Excited, 1) => 8,
            (Manifold::Excited, _) => 11,
        };
        Some(block + (self.m + self.f) as usize)
    }
}

/// All 16 levels in basis order.
pub fn levels() -> Vec<AtomicLevel> {
    let mut out = Vec::with_capacity(N_LEVELS);
    for manifold in [Manifold::Ground, Manifold::Excited] {
        for f in 1..=2 {
            for m in -f..=f {
                out.push(AtomicLevel { manifold, f, m });
            }
        }
    }
    out
}

/// Hyperfine splittings and linewidth, all in MHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomConstants {
    /// Ground-state hyperfine splitting.
    pub omega_2: f64,
    /// Excited-state (5P1/2) hyperfine splitting.
    pub omega_21p: f64,
    /// D1 decay rate.
    pub gamma: f64,
}

impl Default for AtomConstants {
    fn default() -> Self {
        Self { omega_2: 6835.0, omega_21p: 812.0, gamma: 5.7 }
    }
}

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn parity_sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

/// Wigner 3-j symbol with doubled arguments (Racah formula).
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let delta = factorial(h(tj1 + tj2 - tj3)) * factorial(h(tj1 - tj2 + tj3)) * factorial(h(-tj1 + tj2 + tj3))
        / factorial(h(tj1 + tj2 + tj3) + 1);
    let norm = factorial(h(tj1 + tm1))
        * factorial(h(tj1 - tm1))
        * factorial(h(tj2 + tm2))
        * factorial(h(tj2 - tm2))
        * factorial(h(tj3 + tm3))
        * factorial(h(tj3 - tm3));
    let k_min = 0.max(h(tj2 - tj3 - tm1)).max(h(tj1 - tj3 + tm2));
    let k_max = h(tj1 + tj2 - tj3).min(h(tj1 - tm1)).min(h(tj2 + tm2));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        sum += parity_sign(k)
            / (factorial(k)
                * factorial(h(tj1 + tj2 - tj3) - k)
                * factorial(h(tj1 - tm1) - k)
                * factorial(h(tj2 + tm2) - k)
                * factorial(h(tj3 - tj2 + tm1) + k)
                * factorial(h(tj3 - tj1 - tm2) + k));
    }
    parity_sign(h(tj1 - tj2 - tm3)) * (delta * norm).sqrt() * sum
}

fn triangle_coeff(ta: i32, tb: i32, tc: i32) -> f64 {
    let h = |x: i32| x / 2;
    factorial(h(ta + tb - tc)) * factorial(h(ta - tb + tc)) * factorial(h(-ta + tb + tc)) / factorial(h(ta + tb + tc) + 1)
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}` with doubled arguments.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    let triads = [(tj1, tj2, tj3), (tj1, tj5, tj6), (tj4, tj2, tj6), (tj4, tj5, tj3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let h = |x: i32| x / 2;
    let pre: f64 = triads.iter().map(|&(a, b, c)| triangle_coeff(a, b, c)).product::<f64>().sqrt();
    let a1 = h(tj1 + tj2 + tj3);
    let a2 = h(tj1 + tj5 + tj6);
    let a3 = h(tj4 + tj2 + tj6);
    let a4 = h(tj4 + tj5 + tj3);
    let b1 = h(tj1 + tj2 + tj4 + tj5);
    let b2 = h(tj2 + tj3 + tj5 + tj6);
    let b3 = h(tj3 + tj1 + tj6 + tj4);
    let t_min = a1.max(a2).max(a3).max(a4);
    let t_max = b1.min(b2).min(b3);
    let mut sum = 0.0;
    for t in t_min..=t_max {
        sum += parity_sign(t) * factorial(t + 1)
            / (factorial(t - a1)
                * factorial(t - a2)
                * factorial(t - a3)
                * factorial(t - a4)
                * factorial(b1 - t)
                * factorial(b2 - t)
                * factorial(b3 - t));
    }
    pre * sum
}

fn check_f(f: i32, m: i32, what: &str) -> Result<()> {
    if !(1..=2).contains(&f) || m.abs() > f {
        return Err(Error::Domain(format!("invalid {what} quantum numbers F={f}, m={m}")));
    }
    Ok(())
}

/// `<F, m | mu_p | F', m'>` for ground `(F, m)` and excited `(F', m')`, in
/// units of the reduced D1 matrix element, Condon-Shortley phases. Zero unless
/// `m' = m + p`.
pub fn dipole_element(f: i32, m: i32, fp: i32, mp: i32, p: i32) -> Result<f64> {
    check_f(f, m, "ground")?;
    check_f(fp, mp, "excited")?;
    if !(-1..=1).contains(&p) {
        return Err(Error::Domain(format!("polarization {p} not in {{-1, 0, 1}}")));
    }
    if mp != m + p {
        return Ok(0.0);
    }
    // spherical component q of r connecting |F', m'> to |F, m> has m = m' + q
    let q = m - mp;
    let reduced = parity_sign(fp + (TWO_J + 2 + TWO_I) / 2)
        * (((2 * fp + 1) * (TWO_J + 1)) as f64).sqrt()
        * wigner_6j(TWO_J, TWO_J, 2, 2 * fp, 2 * f, TWO_I);
    let angular = parity_sign(fp - 1 + m)
        * ((2 * f + 1) as f64).sqrt()
        * wigner_3j(2 * fp, 2, 2 * f, 2 * mp, 2 * q, -2 * m);
    Ok(reduced * angular)
}

/// `A_{FF'}^{(p)} = sum_m <F,m|mu_p|F',m+p> |F,m><F',m+p|` embedded in
/// `layout` on its atomic factor.
pub fn transition_operator(f: i32, fp: i32, p: i32, layout: &SpaceLayout) -> Result<Operator> {
    let atomic = atomic_transition(f, fp, p)?;
    Operator::from_csr_auto(SpaceLayout::single(ATOM, N_LEVELS), atomic)?.embed(layout, ATOM)
}

/// The 16x16 matrix of `A_{FF'}^{(p)}`.
pub fn atomic_transition(f: i32, fp: i32, p: i32) -> Result<CsrMatrix> {
    if !(1..=2).contains(&f) || !(1..=2).contains(&fp) || !(-1..=1).contains(&p) {
        return Err(Error::Domain(format!("invalid transition F={f}, F'={fp}, p={p}")));
    }
    let mut trip = Vec::new();
    for m in -f..=f {
        let mp = m + p;
        if mp.abs() > fp {
            continue;
        }
        let d = dipole_element(f, m, fp, mp, p)?;
        if d != 0.0 {
            let g = AtomicLevel::ground(f, m).index().unwrap();
            let e = AtomicLevel::excited(fp, mp).index().unwrap();
            trip.push((g, e, C64::new(d, 0.0)));
        }
    }
    Ok(CsrMatrix::from_triplets(N_LEVELS, N_LEVELS, trip))
}

/// All 12 `(F, F', p)` dipole channels.
pub fn channels() -> impl Iterator<Item = (i32, i32, i32)> {
    (1..=2).flat_map(|f| (1..=2).flat_map(move |fp| (-1..=1).map(move |p| (f, fp, p))))
}

/// Diagonal projector onto the levels matching `pred`, as a 16x16 matrix.
pub fn projector(pred: impl Fn(&AtomicLevel) -> bool) -> CsrMatrix {
    let diag: Vec<C64> = levels().iter().map(|l| C64::new(if pred(l) { 1.0 } else { 0.0 }, 0.0)).collect();
    CsrMatrix::from_diagonal(&diag)
}
