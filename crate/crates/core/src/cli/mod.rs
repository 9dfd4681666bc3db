//! Command-line front end: presets, run configurations and CSV/SVG output.
//!
//! Subcommands:
//!
//! * `params` prints effective parameters of a preset, of every preset
//!   (`--all`), or the laser settings realizing design targets.
//! * `evolve` integrates the full, effective or semiclassical model. The
//!   initial state is `|e0>` unless `--init g0`.
//! * `steady` scans `U` and reports steady-state `sz, n, g2`.
//! * `wigner` samples the cavity Wigner function of a steady or evolved state.
//! * `semi` integrates the mean-field equations.
//! * `spectrum` lists the lowest Rabi-model levels.

pub mod config;
pub mod output;
pub mod presets;

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use crate::dynamics::{
    evolve, par_map, steady_state, uniform_grid, Probe, SolverOptions, SteadyOptions, FOCK_GUARD_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::hilbert::{basis_state, partial_trace, qubit_ops, DensityMatrix, CAVITY, QUBIT};
use crate::models::{
    build_effective, build_full, build_two_channel, design_physical, effective_params, full_sigma_z,
    parity_operator, qubit_level, qubit_subspace_projector, rabi_spectrum, EffectiveParams, PhysicalParams,
    TimeDependentGenerator,
};
use crate::observables::{g2_zero, log_negativity, photon_number_operator, wigner, GridSpec};
use crate::semiclassical::{semi_integrate, SemiParams, SemiState};
pub use config::{parse_config, InitialState, ModelKind, RunConfig};
use output::{emit_csv, emit_svgs, Table};
pub use presets::{find_preset, presets, Preset, PresetCheck, PresetTable};

#[derive(Debug, Parser)]
#[command(name = "rabisim", version, about = "Generalized quantum Rabi model in cavity QED")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective parameters of a preset, or laser settings for design targets.
    Params(ParamsArgs),
    /// Time evolution to CSV: `t_us` then one column per observable.
    Evolve(EvolveArgs),
    /// Steady-state scan over U to CSV `U,sz,n,g2`.
    Steady(SteadyArgs),
    /// Cavity Wigner function to CSV `x,y,W`.
    Wigner(WignerArgs),
    /// Mean-field trajectory to CSV `t_us,re_alpha,im_alpha,re_beta,im_beta,w`.
    Semi(SemiArgs),
    /// Lowest Rabi-model levels to CSV `index,energy_MHz`.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub preset: Option<String>,
    /// Check every preset against its published row.
    #[arg(long)]
    pub all: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub geff: Option<f64>,
    #[arg(long, default_value_t = 200.0)]
    pub g_cav: f64,
    #[arg(long, default_value_t = -20000.0, allow_hyphen_values = true)]
    pub delta2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub kappa: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base path for one SVG line plot per column.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Run configuration file; flags given alongside override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub sample_dt: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub init: Option<InitialState>,
    /// Comma-separated: P_e0 or P_g0, n, sz, parity, logneg, P_sub.
    #[arg(long, value_delimiter = ',')]
    pub observables: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RabiArgs {
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub geff: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega0: f64,
    #[arg(long, default_value_t = 0.2)]
    pub kappa: f64,
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub rabi: RabiArgs,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub u_from: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub u_to: f64,
    #[arg(long, default_value_t = 81)]
    pub u_steps: usize,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub rabi: RabiArgs,
    #[arg(long, default_value_t = -2.1, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Evolve from `--init` for this many μs instead of using the steady state.
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long, default_value = "g0")]
    pub init: InitialState,
    /// Half-width of the square grid in units of the quadratures.
    #[arg(long, default_value_t = 6.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 121)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SemiArgs {
    #[command(flatten)]
    pub rabi: RabiArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sample_dt: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    /// Initial inversion; the spin starts on the Bloch sphere with real `beta`.
    #[arg(long, default_value_t = -0.99, allow_hyphen_values = true)]
    pub w: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub geff: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub omega0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit status for an error: 2 for invalid input, 3 for numerical
/// failures, 4 for I/O.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        Error::Truncation(_)
        | Error::DegenerateSteadyState(_)
        | Error::Stiffness(_)
        | Error::Singular(_)
        | Error::UndefinedCorrelation(_) => 3,
        _ => 2,
    }
}

/// Parses `args` and runs the command, reporting errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Params(a) => {
            print!("{}", params_report(a)?);
            Ok(())
        }
        Command::Evolve(a) => {
            let config = evolve_config(a)?;
            let table = run_config(&config)?;
            finish(&table, config.out.as_deref(), config.svg.as_deref())
        }
        Command::Steady(a) => finish(&steady_scan(a)?, a.output.out.as_deref(), a.output.svg.as_deref()),
        Command::Wigner(a) => finish(&wigner_table(a)?, a.out.as_deref(), None),
        Command::Semi(a) => finish(&semi_table(a)?, a.output.out.as_deref(), a.output.svg.as_deref()),
        Command::Spectrum(a) => finish(&spectrum_table(a)?, a.out.as_deref(), None),
    }
}

fn finish(table: &Table, out: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    emit_csv(table, out)?;
    if let Some(base) = svg {
        for p in emit_svgs(table, base)? {
            log::info!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn effective_line(e: &EffectiveParams) -> String {
    format!("omega0 = {:.2} MHz\nomega = {:.2} MHz\ng_eff = {:.2} MHz\nU = {:.2} MHz\n", e.omega0, e.omega, e.g_eff, e.u)
}

/// Text printed by `params`.
pub fn params_report(a: &ParamsArgs) -> Result<String> {
    if a.all {
        let mut s = format!(
            "{:<7} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9}  status\n",
            "preset", "omega0", "omega", "g_eff", "U", "max_dev", "rounding"
        );
        for p in presets() {
            let c = p.check()?;
            let sign = if p.negate { -1.0 } else { 1.0 };
            let status = if c.within(0.02) {
                "ok"
            } else if c.within_rounding(0.02) {
                "ok within rounding"
            } else {
                "MISMATCH"
            };
            let widest = c.rounding.iter().fold(0.0f64, |m, r| m.max(*r));
            s.push_str(&format!(
                "{:<7} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>9.4} {:>9.4}  {status}\n",
                p.name,
                sign * c.computed[0],
                sign * c.computed[1],
                sign * c.computed[2],
                sign * c.computed[3],
                c.max_deviation(),
                widest
            ));
        }
        return Ok(s);
    }
    if let Some(name) = &a.preset {
        let p = find_preset(name)?;
        let e = p.effective()?;
        let mut s = format!("preset {}\n", p.name);
        if p.negate {
            s.push_str("realizes -H with\n");
            s.push_str(&effective_line(&EffectiveParams { negate_hamiltonian: true, ..e }.signed()));
        } else {
            s.push_str(&effective_line(&e));
        }
        s.push_str(&format!("kappa = {:.2} MHz\n", p.phys.kappa));
        return Ok(s);
    }
    match (a.omega0, a.omega, a.geff) {
        (Some(omega0), Some(omega), Some(g_eff)) => {
            let targets = EffectiveParams::new(omega0, omega, g_eff, 0.0, a.kappa);
            let phys = design_physical(&targets, a.g_cav, a.delta2, Default::default())?;
            let e = effective_params(&phys)?.params;
            Ok(format!(
                "g_cav = {:.4} MHz\nomega1 = {:.4} MHz\nomega2 = {:.4} MHz\ndelta1 = {:.4} MHz\ndelta2 = {:.4} MHz\n\
                 delta = {:.6} MHz\ndelta_cav = {:.6} MHz\n{}",
                phys.g_cav,
                phys.omega1,
                phys.omega2,
                phys.delta1,
                phys.delta2,
                phys.delta,
                phys.delta_cav,
                effective_line(&e)
            ))
        }
        _ => Err(Error::Config("params needs --preset, --all, or all of --omega0 --omega --geff".into())),
    }
}

/// Merges `--config` with the flags given alongside it.
pub fn evolve_config(a: &EvolveArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => {
            let preset = a.preset.as_deref().ok_or_else(|| Error::Config("evolve needs --config or --preset".into()))?;
            let t_max = a.t_max.ok_or_else(|| Error::Config("evolve needs --t-max".into()))?;
            let p = find_preset(preset)?;
            let model = a.model.unwrap_or(ModelKind::Effective);
            RunConfig {
                model,
                preset: Some(p.name.to_string()),
                phys: p.phys,
                negate: p.negate,
                n_max: model.default_n_max(),
                t_max,
                sample_dt: 0.01,
                init: InitialState::E0,
                observables: Vec::new(),
                out: None,
                svg: None,
            }
        }
    };
    if a.config.is_some() {
        if let Some(name) = &a.preset {
            let p = find_preset(name)?;
            c.preset = Some(p.name.to_string());
            c.phys = PhysicalParams { kappa: c.phys.kappa, ..p.phys };
            c.negate = p.negate;
        }
        if let Some(m) = a.model {
            c.model = m;
        }
        if let Some(t) = a.t_max {
            c.t_max = t;
        }
    }
    if let Some(k) = a.kappa {
        c.phys.kappa = k;
    }
    if let Some(dt) = a.sample_dt {
        c.sample_dt = dt;
    }
    if let Some(n) = a.n_max {
        c.n_max = n;
    }
    if let Some(i) = a.init {
        c.init = i;
    }
    if !a.observables.is_empty() {
        c.observables = a.observables.clone();
    }
    if a.output.out.is_some() {
        c.out = a.output.out.clone();
    }
    if a.output.svg.is_some() {
        c.svg = a.output.svg.clone();
    }
    c.validate()?;
    Ok(c)
}

/// Summed population of the two highest Fock levels.
fn top_fock_population(rho: &DensityMatrix) -> f64 {
    let layout = rho.layout();
    let Ok(pos) = layout.position(CAVITY) else { return 0.0 };
    let dim = layout.factors()[pos].1;
    (0..layout.total_dim())
        .filter(|&i| layout.unflatten(i)[pos] + 2 >= dim)
        .map(|i| rho.matrix()[(i, i)].re)
        .sum()
}

const TOP_FOCK: &str = "top_fock";

fn probes_for(config: &RunConfig, gen: &TimeDependentGenerator, psi0_parts: &[usize]) -> Result<Vec<Probe>> {
    let layout = gen.layout().clone();
    let survival = format!("P_{}", config.init.label());
    let names: Vec<String> = if config.observables.is_empty() {
        match config.model {
            ModelKind::Full => vec![survival.clone(), "n".into(), "P_sub".into()],
            _ => vec![survival.clone(), "n".into()],
        }
    } else {
        config.observables.clone()
    };
    let full = config.model == ModelKind::Full;
    let mut probes = Vec::new();
    for name in names {
        let probe = match name.as_str() {
            s if s == survival => Probe::overlap(s, basis_state(&layout, psi0_parts)),
            "n" => Probe::expectation("n", photon_number_operator(&layout)?),
            "sz" if full => Probe::expectation("sz", full_sigma_z(config.n_max)?),
            "sz" => Probe::expectation("sz", qubit_ops().0.embed(&layout, QUBIT)?),
            "P_sub" if full => Probe::expectation("P_sub", qubit_subspace_projector(config.n_max)?),
            "parity" if !full => Probe::expectation("parity", parity_operator(config.n_max)?),
            "logneg" if !full => Probe::custom("logneg", |rho| log_negativity(rho, QUBIT).unwrap_or(f64::NAN)),
            other => {
                return Err(Error::Config(format!("observable `{other}` is not available for the {:?} model", config.model)))
            }
        };
        probes.push(probe);
    }
    probes.push(Probe::custom(TOP_FOCK, top_fock_population));
    Ok(probes)
}

/// Runs `evolve` for a configuration and returns its CSV table.
pub fn run_config(config: &RunConfig) -> Result<Table> {
    config.validate()?;
    let map = effective_params(&config.phys)?;
    if config.model == ModelKind::Semiclassical {
        let e = map.params;
        let p = SemiParams { omega: e.omega, omega0: e.omega0, g: e.g_eff, u: e.u, kappa: e.kappa };
        // A slight tilt off the pole so that the spin can leave it.
        let tilt: f64 = 1e-3;
        let w = if config.init == InitialState::E0 { tilt.cos() } else { -tilt.cos() };
        let s0 = SemiState { alpha: C64::new(0.0, 0.0), beta: C64::new(0.5 * tilt.sin(), 0.0), w };
        return semi_trajectory(&s0, &p, config.t_max, config.sample_dt);
    }
    let q = config.init.qubit();
    let (gen, parts, opts) = match config.model {
        ModelKind::Full => {
            let gen = build_full(&config.phys, config.n_max, false)?;
            let level = qubit_level(q).index().expect("qubit levels are physical");
            log::info!("full model: dimension {}, this may take minutes", gen.layout().total_dim());
            let opts = SolverOptions::for_generator(&gen);
            (gen, vec![level, 0], opts)
        }
        _ => {
            let gen = build_two_channel(&map.params, map.g1, map.g2, config.n_max)?;
            (gen, vec![q, 0], SolverOptions::default())
        }
    };
    let rho0 = DensityMatrix::basis(gen.layout().clone(), &parts);
    let probes = probes_for(config, &gen, &parts)?;
    let grid = uniform_grid(config.t_max, config.sample_dt)?;
    let traj = evolve(&gen, &rho0, &grid, &opts.with_fock_guard(false), &probes)?;

    let top = traj.get(TOP_FOCK).map(|v| v.iter().fold(0.0f64, |m, x| m.max(*x))).unwrap_or(0.0);
    if top > FOCK_GUARD_THRESHOLD {
        log::warn!("top two Fock levels reach {top:.3e} > {FOCK_GUARD_THRESHOLD:.0e}; raise n_max");
    }
    let columns: Vec<&(String, Vec<f64>)> = traj.observables.iter().filter(|(n, _)| n != TOP_FOCK).collect();
    let mut table = Table::new(std::iter::once("t_us".to_string()).chain(columns.iter().map(|(n, _)| n.clone())));
    for (k, t) in traj.times.iter().enumerate() {
        table.push(std::iter::once(*t).chain(columns.iter().map(|(_, v)| v[k])).collect());
    }
    Ok(table)
}

fn rabi_params(r: &RabiArgs, u: f64) -> EffectiveParams {
    EffectiveParams::new(r.omega0, r.omega, r.geff, u, r.kappa)
}

/// `U` values of a scan, endpoints included.
pub fn scan_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::Config("u-steps must be positive".into())),
        1 => Ok(vec![from]),
        _ => Ok((0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect()),
    }
}

/// Steady-state `sz`, `n` and `g2` of the effective model.
pub fn steady_point(eff: &EffectiveParams, n_max: usize) -> Result<[f64; 3]> {
    let gen = build_effective(eff, n_max)?;
    let ss = steady_state(&gen, &SteadyOptions::default())?;
    let top = top_fock_population(&ss.rho);
    if top > FOCK_GUARD_THRESHOLD {
        log::warn!("U = {}: top two Fock levels hold {top:.3e}; raise n_max", eff.u);
    }
    let sz = ss.rho.expect(&qubit_ops().0.embed(gen.layout(), QUBIT)?)?.re;
    let n = ss.rho.expect(&photon_number_operator(gen.layout())?)?.re;
    let g2 = match g2_zero(&ss.rho) {
        Ok(v) => v,
        Err(Error::UndefinedCorrelation(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok([sz, n, g2])
}

pub fn steady_scan(a: &SteadyArgs) -> Result<Table> {
    let us = scan_values(a.u_from, a.u_to, a.u_steps)?;
    let points = par_map(&us, |&u| steady_point(&rabi_params(&a.rabi, u), a.n_max));
    let mut table = Table::new(["U", "sz", "n", "g2"]);
    for (u, p) in us.iter().zip(points) {
        let [sz, n, g2] = p?;
        table.push(vec![*u, sz, n, g2]);
    }
    Ok(table)
}

pub fn wigner_table(a: &WignerArgs) -> Result<Table> {
    let eff = rabi_params(&a.rabi, a.u);
    let gen = build_effective(&eff, a.n_max)?;
    let rho = match a.time {
        None => steady_state(&gen, &SteadyOptions::default())?.rho,
        Some(t) => {
            let rho0 = DensityMatrix::basis(gen.layout().clone(), &[a.init.qubit(), 0]);
            evolve(&gen, &rho0, &[0.0, t], &SolverOptions::default(), &[])?.final_state
        }
    };
    let cav = partial_trace(&rho, CAVITY)?;
    let spec = GridSpec {
        x_min: -a.extent,
        x_max: a.extent,
        nx: a.points,
        y_min: -a.extent,
        y_max: a.extent,
        ny: a.points,
    };
    let grid = wigner(&cav, &spec)?;
    log::info!("Wigner integral {:.4}, {} maxima above 10% of peak", grid.integral(), grid.local_maxima(0.1).len());
    let mut table = Table::new(["x", "y", "W"]);
    for (iy, y) in grid.y_axis.iter().enumerate() {
        for (ix, x) in grid.x_axis.iter().enumerate() {
            table.push(vec![*x, *y, grid.values[(iy, ix)]]);
        }
    }
    Ok(table)
}

fn semi_trajectory(s0: &SemiState, p: &SemiParams, t_max: f64, dt: f64) -> Result<Table> {
    let grid = uniform_grid(t_max, dt)?;
    let states = semi_integrate(s0, p, &grid)?;
    let mut table = Table::new(["t_us", "re_alpha", "im_alpha", "re_beta", "im_beta", "w"]);
    for (t, s) in grid.iter().zip(states) {
        let mut row = vec![*t];
        row.extend(s.to_array());
        table.push(row);
    }
    Ok(table)
}

pub fn semi_table(a: &SemiArgs) -> Result<Table> {
    if !(-1.0..=1.0).contains(&a.w) {
        return Err(Error::Config(format!("initial w must lie in [-1, 1], got {}", a.w)));
    }
    let p = SemiParams { omega: a.rabi.omega, omega0: a.rabi.omega0, g: a.rabi.geff, u: a.u, kappa: a.rabi.kappa };
    let s0 = SemiState {
        alpha: C64::new(a.alpha_re, a.alpha_im),
        beta: C64::new(0.5 * (1.0 - a.w * a.w).sqrt(), 0.0),
        w: a.w,
    };
    semi_trajectory(&s0, &p, a.t_max, a.sample_dt)
}

pub fn spectrum_table(a: &SpectrumArgs) -> Result<Table> {
    let eff = match &a.preset {
        Some(name) => find_preset(name)?.effective()?,
        None => EffectiveParams::new(a.omega0, a.omega, a.geff, a.u, 0.0),
    };
    let levels = rabi_spectrum(&eff, a.n_max, a.count)?;
    let mut table = Table::new(["index", "energy_MHz"]);
    for (k, e) in levels.iter().enumerate() {
        table.push(vec![k as f64, e / TAU]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("rabisim").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn params_for_first_preset() {
        let Command::Params(a) = parse(&["params", "--preset", "Ia"]).command else { panic!() };
        let text = params_report(&a).unwrap();
        for line in ["omega0 = -0.01 MHz", "omega = 1.00 MHz", "g_eff = 0.50 MHz", "U = -0.18 MHz"] {
            assert!(text.contains(line), "{text}");
        }
    }

    #[test]
    fn params_design_round_trip() {
        let Command::Params(a) = parse(&["params", "--omega0", "0", "--omega", "1", "--geff", "2"]).command else {
            panic!()
        };
        let text = params_report(&a).unwrap();
        assert!(text.contains("g_eff = 2.00 MHz"), "{text}");
    }

    #[test]
    fn evolve_flags_build_a_config() {
        let Command::Evolve(a) =
            parse(&["evolve", "--preset", "IIa", "--model", "effective", "--kappa", "0.01", "--t-max", "4"]).command
        else {
            panic!()
        };
        let c = evolve_config(&a).unwrap();
        assert_eq!(c.phys.kappa, 0.01);
        assert_eq!(c.model, ModelKind::Effective);
        assert_eq!(c.init, InitialState::E0);
    }

    #[test]
    fn unknown_observable_is_rejected() {
        let mut c = parse_config("model=effective\npreset=Ia\nt_max=0.1\nn_max=6").unwrap();
        c.observables = vec!["P_sub".into()];
        assert!(matches!(run_config(&c), Err(Error::Config(_))));
    }

    #[test]
    fn semiclassical_config_runs() {
        let c = parse_config("model=semiclassical\npreset=T4-III\nt_max=1\nsample_dt=0.1").unwrap();
        let t = run_config(&c).unwrap();
        assert_eq!(t.headers, ["t_us", "re_alpha", "im_alpha", "re_beta", "im_beta", "w"]);
        assert_eq!(t.rows.len(), 11);
    }

    #[test]
    fn exit_codes_separate_input_and_numerics() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Stiffness("x".into())), 3);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 4);
    }

    #[test]
    fn spectrum_of_displaced_oscillators() {
        let Command::Spectrum(a) = parse(&["spectrum", "--geff", "0.5", "--count", "4", "--n-max", "30"]).command
        else {
            panic!()
        };
        let t = spectrum_table(&a).unwrap();
        let e = t.column("energy_MHz").unwrap();
        assert!((e[0] + 0.25).abs() < 1e-8 && (e[1] + 0.25).abs() < 1e-8 && (e[2] - 0.75).abs() < 1e-8, "{e:?}");
    }
}
