//! Model construction: the rotating-frame D1 master equation, the effective
//! generalized Rabi model, and the map between laser/cavity parameters and
//! effective Rabi parameters.
//!
//! All stored frequencies are ordinary frequencies in MHz. Generators carry
//! the factor 2π, so time is in μs.

use std::f64::consts::{PI, TAU};

use log::{debug, warn};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::atom::{self, AtomConstants, AtomicLevel, Manifold, N_LEVELS};
use crate::error::{Error, Result};
use crate::hilbert::{linalg, CsrMatrix, Operator, SpaceLayout, ATOM, CAVITY, ONE, QUBIT, ZERO};

/// Laser, cavity and atom inputs of the full D1 model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub g_cav: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta: f64,
    pub delta_cav: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub atom: AtomConstants,
}

impl PhysicalParams {
    /// Half the laser frequency difference, `omega_2 - delta`.
    pub fn omega_tilde2(&self) -> f64 {
        self.atom.omega_2 - self.delta
    }

    /// `Delta1 + omega_tilde2 - omega_21'`: the value of `Delta2` implied by
    /// `Delta1` through the frame identity.
    pub fn implied_delta2(&self) -> f64 {
        self.delta1 + self.omega_tilde2() - self.atom.omega_21p
    }

    /// `|Delta_{1,2}| > 10 max(g_cav, |Omega_{1,2}|, kappa, gamma)`.
    pub fn is_adiabatic(&self) -> bool {
        let scale = self.g_cav.abs().max(self.omega1.abs()).max(self.omega2.abs()).max(self.kappa).max(self.gamma);
        self.delta1.abs() > 10.0 * scale && self.delta2.abs() > 10.0 * scale
    }

    pub fn check_adiabatic(&self) -> Result<()> {
        if self.is_adiabatic() {
            Ok(())
        } else {
            Err(Error::Adiabaticity(format!(
                "|Delta1| = {}, |Delta2| = {} not ten times above the largest coupling or rate",
                self.delta1.abs(),
                self.delta2.abs()
            )))
        }
    }
}

/// Parameters of the generalized Rabi Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EffectiveParams {
    pub omega0: f64,
    pub omega: f64,
    pub g_eff: f64,
    pub u: f64,
    pub kappa: f64,
    /// Evolve under `-H` instead of `H`.
    pub negate_hamiltonian: bool,
}

impl EffectiveParams {
    pub fn new(omega0: f64, omega: f64, g_eff: f64, u: f64, kappa: f64) -> Self {
        Self { omega0, omega, g_eff, u, kappa, negate_hamiltonian: false }
    }

    /// The parameters actually multiplying the operators, with the overall
    /// sign folded in.
    pub fn signed(&self) -> Self {
        if self.negate_hamiltonian {
            Self {
                omega0: -self.omega0,
                omega: -self.omega,
                g_eff: -self.g_eff,
                u: -self.u,
                kappa: self.kappa,
                negate_hamiltonian: false,
            }
        } else {
            *self
        }
    }
}

/// Output of [`effective_params`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveMap {
    /// `g_eff` is `g1` when balanced and the mean of the two otherwise.
    pub params: EffectiveParams,
    /// Coupling of `sigma_+ a`.
    pub g1: C64,
    /// Coupling of `sigma_- a`.
    pub g2: C64,
    pub balanced: bool,
}

fn nonzero(x: f64, what: &str) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        Err(Error::SingularDetuning(format!("{what} = {x}")))
    } else {
        Ok(x)
    }
}

/// Effective Rabi parameters from the adiabatic-elimination formulas, with
/// `omega_tilde2 = omega_2 - delta`.
pub fn effective_params(phys: &PhysicalParams) -> Result<EffectiveMap> {
    effective_params_at(phys, phys.omega_tilde2())
}

/// As [`effective_params`] with an explicit `omega_tilde2` in the shifted
/// denominators.
pub fn effective_params_at(phys: &PhysicalParams, omega_tilde2: f64) -> Result<EffectiveMap> {
    let map = effective_params_quiet(phys, omega_tilde2)?;
    let (g1, g2) = (map.g1, map.g2);
    if (g1 - g2).norm() > 0.05 * g1.norm().max(g2.norm()) {
        warn!("unbalanced Raman couplings: g1 = {:.6}, g2 = {:.6}", g1.re, g2.re);
    } else if !map.balanced {
        debug!("Raman couplings g1 = {:.6}, g2 = {:.6}", g1.re, g2.re);
    }
    Ok(map)
}

/// [`effective_params_at`] without diagnostics.
pub(crate) fn effective_params_quiet(phys: &PhysicalParams, omega_tilde2: f64) -> Result<EffectiveMap> {
    let d1 = nonzero(phys.delta1, "Delta1")?;
    let d2 = nonzero(phys.delta2, "Delta2")?;
    let d2p = nonzero(phys.delta2 + phys.atom.omega_21p, "Delta2 + omega_21'")?;
    let d2t = nonzero(phys.delta2 + omega_tilde2, "Delta2 + omega_tilde2")?;
    let d1t = nonzero(phys.delta1 + 2.0 * omega_tilde2, "Delta1 + 2 omega_tilde2")?;
    let (o1, o2, g) = (phys.omega1, phys.omega2, phys.g_cav);
    let o1s = o1 * o1;
    let o2s = o2 * o2;
    let gs = g * g;

    let omega0 =
        0.5 * o1s / d1 - 0.5 * o2s / d2 - o2s / (6.0 * d2p) + o2s / (12.0 * d2t) + o2s / (12.0 * d1t) + phys.delta;
    let omega = phys.delta_cav - 0.5 * gs * (1.0 / (3.0 * d1) + 1.0 / (4.0 * d2p) + 1.0 / (12.0 * d2));
    let u = gs * (1.0 / (4.0 * d2p) + 1.0 / (12.0 * d2) - 1.0 / (3.0 * d1));
    let sqrt6 = 6f64.sqrt();
    let g1 = C64::new(g * o2 * (1.0 / d2 + 1.0 / d2p) / (2.0 * sqrt6), 0.0);
    let g2 = C64::new(g * o1 / (d1 * sqrt6), 0.0);

    let balanced = (g1 - g2).norm() < 1e-9 * g1.norm().max(1.0);
    let g_eff = if balanced { g1.re } else { 0.5 * (g1.re + g2.re) };
    Ok(EffectiveMap {
        params: EffectiveParams { omega0, omega, g_eff, u, kappa: phys.kappa, negate_hamiltonian: false },
        g1,
        g2,
        balanced,
    })
}

/// The `Omega2` that equalizes the two Raman couplings:
/// `Omega2/Delta2 + Omega2/(Delta2 + omega_21') = 2 Omega1/Delta1`.
pub fn balance_omega2(phys: &PhysicalParams) -> Result<f64> {
    let d1 = nonzero(phys.delta1, "Delta1")?;
    let d2 = nonzero(phys.delta2, "Delta2")?;
    let d2p = nonzero(phys.delta2 + phys.atom.omega_21p, "Delta2 + omega_21'")?;
    let denom = nonzero(1.0 / d2 + 1.0 / d2p, "1/Delta2 + 1/(Delta2 + omega_21')")?;
    Ok(2.0 * phys.omega1 / d1 / denom)
}

/// Chooses laser parameters realizing `targets.omega0`, `targets.omega` and
/// `targets.g_eff` for fixed `g_cav` and `Delta2`. `U` follows from the
/// detunings and is reported in the result's effective parameters.
pub fn design_physical(
    targets: &EffectiveParams,
    g_cav: f64,
    delta2: f64,
    atom: AtomConstants,
) -> Result<PhysicalParams> {
    if g_cav <= 0.0 || !g_cav.is_finite() {
        return Err(Error::Domain(format!("g_cav must be positive, got {g_cav}")));
    }
    let mut phys = PhysicalParams {
        g_cav,
        omega1: 0.0,
        omega2: 0.0,
        delta1: 0.0,
        delta2,
        delta: 0.0,
        delta_cav: 0.0,
        kappa: targets.kappa,
        gamma: atom.gamma,
        atom,
    };
    for _ in 0..50 {
        let previous = phys;
        phys.delta1 = delta2 + atom.omega_21p - phys.omega_tilde2();
        nonzero(phys.delta1, "Delta1")?;
        phys.omega1 = 6f64.sqrt() * targets.g_eff * phys.delta1 / g_cav;
        if phys.omega1.abs() > phys.delta1.abs() / 10.0 {
            return Err(Error::Adiabaticity(format!(
                "g_eff = {} needs |Omega1| = {:.1} above |Delta1|/10 = {:.1}",
                targets.g_eff,
                phys.omega1.abs(),
                phys.delta1.abs() / 10.0
            )));
        }
        phys.omega2 = balance_omega2(&phys)?;
        let shifts = effective_params(&PhysicalParams { delta: 0.0, delta_cav: 0.0, ..phys })?;
        // omega0 depends on delta through omega_tilde2 as well; a few
        // fixed-point sweeps settle it.
        phys.delta = targets.omega0 - shifts.params.omega0;
        for _ in 0..5 {
            let e = effective_params(&phys)?;
            phys.delta += targets.omega0 - e.params.omega0;
        }
        phys.delta_cav = targets.omega - shifts.params.omega;
        let moved = (phys.delta1 - previous.delta1).abs() + (phys.delta - previous.delta).abs();
        if moved < 1e-12 * phys.delta1.abs() {
            break;
        }
    }
    phys.check_adiabatic()?;
    Ok(phys)
}

/// `U` as a function of `Delta2` with `Delta1` tied to it by the frame
/// identity at `delta = 0`.
pub fn u_of_delta2(g_cav: f64, delta2: f64, atom: AtomConstants) -> Result<f64> {
    let phys = PhysicalParams {
        g_cav,
        omega1: 0.0,
        omega2: 0.0,
        delta1: delta2 + atom.omega_21p - atom.omega_2,
        delta2,
        delta: 0.0,
        delta_cav: 0.0,
        kappa: 0.0,
        gamma: atom.gamma,
        atom,
    };
    Ok(effective_params(&phys)?.params.u)
}

/// Bisects `Delta2` in `[lo, hi]` until `U(Delta2)` hits `target_u`; the
/// bracket is narrowed to 1e-4 MHz.
pub fn delta2_for_u(target_u: f64, g_cav: f64, atom: AtomConstants, lo: f64, hi: f64) -> Result<f64> {
    let f = |d2: f64| u_of_delta2(g_cav, d2, atom).map(|u| u - target_u);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa * fb > 0.0 {
        return Err(Error::Domain(format!("U = {target_u} is not bracketed by Delta2 in [{lo}, {hi}]")));
    }
    while (b - a).abs() > 1e-4 {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// A Hamiltonian component oscillating as `op e^{-i 2 pi nu t} + h.c.`.
#[derive(Clone, Debug)]
pub struct Harmonic {
    /// `nu` in MHz.
    pub frequency: f64,
    pub op: Operator,
}

/// A Lindblad channel `rate * D[jump]` with `D[O]rho = 2 O rho O^dag - {O^dag O, rho}`.
#[derive(Clone, Debug)]
pub struct Dissipator {
    /// In rad/μs.
    pub rate: f64,
    pub jump: Operator,
}

/// Static Hamiltonian, harmonic components and dissipators of a master
/// equation. Operators are in rad/μs.
#[derive(Clone, Debug)]
pub struct TimeDependentGenerator {
    pub hamiltonian: Operator,
    pub harmonics: Vec<Harmonic>,
    pub dissipators: Vec<Dissipator>,
}

impl TimeDependentGenerator {
    pub fn layout(&self) -> &SpaceLayout {
        self.hamiltonian.layout()
    }

    pub fn is_static(&self) -> bool {
        self.harmonics.is_empty()
    }

    /// Largest harmonic frequency in MHz, zero for a static generator.
    pub fn max_frequency(&self) -> f64 {
        self.harmonics.iter().map(|h| h.frequency.abs()).fold(0.0, f64::max)
    }

    /// `H(t)` in rad/μs at time `t` in μs.
    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        let mut h = self.hamiltonian.clone();
        for k in &self.harmonics {
            let phase = C64::from_polar(1.0, -TAU * k.frequency * t);
            let term = k.op.scale(phase);
            h = h.add(&term).and_then(|h| h.add(&term.adjoint())).expect("generator layout");
        }
        h
    }
}

/// `sigma_z (x) 1`, `sigma_+ (x) 1`, `1 (x) a`, `1 (x) a^dag a` on qubit (x) Fock,
/// all as sparse matrices.
struct QubitFockOps {
    layout: SpaceLayout,
    sz: CsrMatrix,
    sp: CsrMatrix,
    a: CsrMatrix,
    n: CsrMatrix,
}

impl QubitFockOps {
    fn new(n_max: usize) -> Result<Self> {
        let layout = SpaceLayout::new([(QUBIT, 2), (CAVITY, n_max)])?;
        let (a, n) = crate::hilbert::fock_ops(n_max)?;
        let (sz, sp) = crate::hilbert::qubit_ops();
        let eye_c = CsrMatrix::identity(n_max);
        let eye_q = CsrMatrix::identity(2);
        Ok(Self {
            layout,
            sz: sz.to_csr().kron(&eye_c),
            sp: sp.to_csr().kron(&eye_c),
            a: eye_q.kron(&a.to_csr()),
            n: eye_q.kron(&n.to_csr()),
        })
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Effective generalized Rabi model
/// `2 pi [(omega0/2) sz + omega n + g (s+ + s-)(a + a^dag) + (U/2) sz n]`
/// (negated on request) with cavity loss `2 pi kappa D[a]`.
pub fn build_effective(eff: &EffectiveParams, n_max: usize) -> Result<TimeDependentGenerator> {
    let g = c(eff.g_eff);
    build_two_channel(eff, g, g, n_max)
}

/// Effective model with independent couplings `g1 sigma_+ a + g2 sigma_- a + h.c.`;
/// `eff.g_eff` is ignored.
pub fn build_two_channel(eff: &EffectiveParams, g1: C64, g2: C64, n_max: usize) -> Result<TimeDependentGenerator> {
    let ops = QubitFockOps::new(n_max)?;
    let sm = ops.sp.adjoint();
    let coupling = ops.sp.matmul(&ops.a).scale(g1).add(&sm.matmul(&ops.a).scale(g2));
    let coupling = coupling.add(&coupling.adjoint());
    let mut h = ops
        .sz
        .scale(c(eff.omega0 / 2.0))
        .add(&ops.n.scale(c(eff.omega)))
        .add(&coupling)
        .add(&ops.sz.matmul(&ops.n).scale(c(eff.u / 2.0)));
    let sign = if eff.negate_hamiltonian { -1.0 } else { 1.0 };
    h = h.scale(c(sign * TAU));
    h.prune(0.0);
    finish_effective(ops, h, eff.kappa)
}

/// Jaynes–Cummings variant: counter-rotating terms dropped.
pub fn build_jaynes_cummings(eff: &EffectiveParams, n_max: usize) -> Result<TimeDependentGenerator> {
    let ops = QubitFockOps::new(n_max)?;
    let coupling = ops.sp.matmul(&ops.a).scale(c(eff.g_eff));
    let coupling = coupling.add(&coupling.adjoint());
    let h = ops
        .sz
        .scale(c(eff.omega0 / 2.0))
        .add(&ops.n.scale(c(eff.omega)))
        .add(&coupling)
        .add(&ops.sz.matmul(&ops.n).scale(c(eff.u / 2.0)));
    let sign = if eff.negate_hamiltonian { -1.0 } else { 1.0 };
    finish_effective(ops, h.scale(c(sign * TAU)), eff.kappa)
}

fn finish_effective(ops: QubitFockOps, h: CsrMatrix, kappa: f64) -> Result<TimeDependentGenerator> {
    let hamiltonian = Operator::from_csr_auto(ops.layout.clone(), h)?;
    let mut dissipators = Vec::new();
    if kappa != 0.0 {
        dissipators.push(Dissipator { rate: TAU * kappa, jump: Operator::from_csr_auto(ops.layout, ops.a)? });
    }
    Ok(TimeDependentGenerator { hamiltonian, harmonics: Vec::new(), dissipators })
}

/// The parity `-sigma_z (-1)^{a^dag a}` on qubit (x) Fock.
pub fn parity_operator(n_max: usize) -> Result<Operator> {
    let layout = SpaceLayout::new([(QUBIT, 2), (CAVITY, n_max)])?;
    let diag: Vec<C64> = (0..2 * n_max)
        .map(|i| {
            let (q, n) = (i / n_max, i % n_max);
            let sz = if q == 1 { 1.0 } else { -1.0 };
            let fock = if n % 2 == 0 { 1.0 } else { -1.0 };
            c(-sz * fock)
        })
        .collect();
    Operator::from_csr_auto(layout, CsrMatrix::from_diagonal(&diag))
}

/// Which light field drives a coupling term of the full model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    /// σ−-polarized laser, Rabi frequency `Omega1`.
    Laser1,
    /// σ+-polarized laser, Rabi frequency `Omega2`.
    Laser2,
    /// π-polarized cavity mode.
    Cavity,
}

impl Field {
    pub fn polarization(self) -> i32 {
        match self {
            Field::Laser1 => -1,
            Field::Laser2 => 1,
            Field::Cavity => 0,
        }
    }
}

/// One of the twelve lowering terms `A_{FF'}^{(p)}` (times `a^dag` for the
/// cavity) of the D1 coupling, with its rotation rate in the rotating frame:
/// the term carries `e^{i s omega_tilde2 t}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CouplingTerm {
    pub field: Field,
    pub f: i32,
    pub fp: i32,
    /// Multiple `s` of `omega_tilde2`.
    pub rotation: i32,
}

/// Frame energy of a level as `(coefficient of omega_L1, coefficient of omega_tilde2)`,
/// using `omega_L2 = omega_L1 - 2 omega_tilde2`.
fn frame_energy(manifold: Manifold, f: i32) -> (i32, i32) {
    match (manifold, f) {
        (Manifold::Ground, 1) => (0, 0),
        (Manifold::Ground, _) => (0, 1),
        // omega_L2 + omega_tilde2
        (Manifold::Excited, 1) => (1, -1),
        (Manifold::Excited, _) => (1, 0),
    }
}

/// All twelve coupling terms with rotation rates derived from the frame
/// energies.
pub fn coupling_terms() -> Vec<CouplingTerm> {
    let cavity = (1, -1);
    let mut out = Vec::with_capacity(12);
    for field in [Field::Laser1, Field::Laser2, Field::Cavity] {
        for f in 1..=2 {
            for fp in 1..=2 {
                let drive = match field {
                    Field::Laser1 => (1, 0),
                    Field::Laser2 => (1, -2),
                    Field::Cavity => cavity,
                };
                let g = frame_energy(Manifold::Ground, f);
                let e = frame_energy(Manifold::Excited, fp);
                let total = (drive.0 + g.0 - e.0, drive.1 + g.1 - e.1);
                debug_assert_eq!(total.0, 0, "optical frequency must cancel");
                out.push(CouplingTerm { field, f, fp, rotation: total.1 });
            }
        }
    }
    out
}

fn atom_cavity_layout(n_max: usize) -> Result<SpaceLayout> {
    SpaceLayout::new([(ATOM, N_LEVELS), (CAVITY, n_max)])
}

/// Rotating-frame D1 model on 16 atomic levels (x) Fock.
///
/// Fails the adiabaticity guard unless `waive_adiabaticity`.
pub fn build_full(phys: &PhysicalParams, n_max: usize, waive_adiabaticity: bool) -> Result<TimeDependentGenerator> {
    if n_max < 8 {
        return Err(Error::InvalidDimension(format!("full model needs n_max >= 8, got {n_max}")));
    }
    if !waive_adiabaticity {
        phys.check_adiabatic()?;
    }
    let layout = atom_cavity_layout(n_max)?;
    let (a, n) = crate::hilbert::fock_ops(n_max)?;
    let a = a.to_csr();
    let ad = a.adjoint();
    let eye_c = CsrMatrix::identity(n_max);

    let levels = atom::levels();
    let atomic_diag: Vec<C64> = levels
        .iter()
        .map(|l| {
            c(match (l.manifold, l.f) {
                (Manifold::Ground, 1) => 0.0,
                (Manifold::Ground, _) => phys.delta,
                (Manifold::Excited, 1) => phys.delta2,
                (Manifold::Excited, _) => phys.delta1,
            })
        })
        .collect();
    let mut h_static = CsrMatrix::from_diagonal(&atomic_diag)
        .kron(&eye_c)
        .add(&CsrMatrix::identity(N_LEVELS).kron(&n.to_csr()).scale(c(phys.delta_cav)));

    let omega_t = phys.omega_tilde2();
    let mut buckets: Vec<(i32, CsrMatrix)> = Vec::new();
    for term in coupling_terms() {
        let lowering = atom::atomic_transition(term.f, term.fp, term.field.polarization())?;
        let op = match term.field {
            Field::Laser1 => lowering.kron(&eye_c).scale(c(phys.omega1)),
            Field::Laser2 => lowering.kron(&eye_c).scale(c(phys.omega2)),
            Field::Cavity => lowering.kron(&ad).scale(c(phys.g_cav)),
        };
        // term e^{i s w t} + h.c. = H_k e^{-i |s| w t} + h.c. with H_k = term^dag
        // for s > 0 and term for s < 0
        match term.rotation {
            0 => h_static = h_static.add(&op).add(&op.adjoint()),
            s => {
                let hk = if s > 0 { op.adjoint() } else { op };
                match buckets.iter_mut().find(|(b, _)| *b == s.abs()) {
                    Some((_, m)) => *m = m.add(&hk),
                    None => buckets.push((s.abs(), hk)),
                }
            }
        }
    }
    buckets.sort_by_key(|(s, _)| *s);

    h_static.prune(0.0);
    let hamiltonian = Operator::from_csr_auto(layout.clone(), h_static.scale(c(TAU)))?;
    let harmonics = buckets
        .into_iter()
        .map(|(s, mut m)| {
            m.prune(0.0);
            Ok(Harmonic { frequency: s as f64 * omega_t, op: Operator::from_csr_auto(layout.clone(), m.scale(c(TAU)))? })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut dissipators = Vec::new();
    if phys.kappa != 0.0 {
        dissipators.push(Dissipator {
            rate: TAU * phys.kappa,
            jump: Operator::from_csr_auto(layout.clone(), CsrMatrix::identity(N_LEVELS).kron(&a))?,
        });
    }
    if phys.gamma != 0.0 {
        for (f, fp, p) in atom::channels() {
            let jump = atom::atomic_transition(f, fp, p)?.kron(&eye_c);
            dissipators.push(Dissipator { rate: PI * phys.gamma, jump: Operator::from_csr_auto(layout.clone(), jump)? });
        }
    }
    Ok(TimeDependentGenerator { hamiltonian, harmonics, dissipators })
}

/// Atomic level playing the effective `|e>` (index 1 of the qubit): the level
/// whose light shift enters `omega0` with a positive sign.
pub const UPPER_LEVEL: AtomicLevel = AtomicLevel { manifold: Manifold::Ground, f: 2, m: -2 };
/// Atomic level playing the effective `|g>` (index 0 of the qubit).
pub const LOWER_LEVEL: AtomicLevel = AtomicLevel { manifold: Manifold::Ground, f: 1, m: -1 };

/// Full-model atomic level for effective qubit index `q` (0 = g, 1 = e).
pub fn qubit_level(q: usize) -> AtomicLevel {
    if q == 0 {
        LOWER_LEVEL
    } else {
        UPPER_LEVEL
    }
}

/// Projector onto `span{|g>, |e>} (x) Fock` in the full model.
pub fn qubit_subspace_projector(n_max: usize) -> Result<Operator> {
    let up = UPPER_LEVEL.index().unwrap();
    let low = LOWER_LEVEL.index().unwrap();
    let p = atom::projector(|l| l.index() == Some(up) || l.index() == Some(low));
    Operator::from_csr_auto(atom_cavity_layout(n_max)?, p.kron(&CsrMatrix::identity(n_max)))
}

/// `|e><e| - |g><g|` on the full model's qubit levels.
pub fn full_sigma_z(n_max: usize) -> Result<Operator> {
    let up = UPPER_LEVEL.index().unwrap();
    let low = LOWER_LEVEL.index().unwrap();
    let mut diag = vec![ZERO; N_LEVELS];
    diag[up] = ONE;
    diag[low] = -ONE;
    Operator::from_csr_auto(atom_cavity_layout(n_max)?, CsrMatrix::from_diagonal(&diag).kron(&CsrMatrix::identity(n_max)))
}

/// The `k` lowest eigenvalues of the generalized Rabi Hamiltonian (rad/μs),
/// checked for convergence by doubling the cutoff.
pub fn rabi_spectrum(eff: &EffectiveParams, n_max: usize, k: usize) -> Result<Vec<f64>> {
    if k > 2 * n_max {
        return Err(Error::InvalidDimension(format!("k = {k} exceeds the dimension {}", 2 * n_max)));
    }
    let lowest = |n: usize| -> Result<Vec<f64>> {
        let h = build_effective(&EffectiveParams { kappa: 0.0, ..*eff }, n)?.hamiltonian.to_dense();
        Ok(linalg::eigvalsh(&h).into_iter().take(k).collect())
    };
    let coarse = lowest(n_max)?;
    let fine = lowest(2 * n_max)?;
    for (i, (a, b)) in coarse.iter().zip(&fine).enumerate() {
        if (a - b).abs() / TAU > 1e-6 {
            return Err(Error::Truncation(format!(
                "level {i} moves by {:.3e} MHz when n_max doubles from {n_max}",
                (a - b).abs() / TAU
            )));
        }
    }
    Ok(fine)
}

/// Eigenvectors of the generalized Rabi Hamiltonian, columns ordered by
/// ascending energy.
pub fn rabi_eigenvectors(eff: &EffectiveParams, n_max: usize) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let h = build_effective(&EffectiveParams { kappa: 0.0, ..*eff }, n_max)?.hamiltonian.to_dense();
    Ok(linalg::eigh(&h))
}
