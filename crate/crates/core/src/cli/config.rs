//! `key=value` run configurations.
//!
//! ```text
//! # Fig. 3 style comparison
//! model = full
//! preset = Ia
//! n_max = 8
//! t_max = 2
//! ```
//!
//! A preset supplies the physical parameters; explicit keys override single
//! entries. Without a preset all of `g_cav, omega1, omega2, delta1, delta2,
//! delta, delta_cav, kappa` are required. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::presets::find_preset;
use crate::atom::AtomConstants;
use crate::error::{Error, Result};
use crate::models::PhysicalParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Full,
    Effective,
    Semiclassical,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(ModelKind::Full),
            "effective" => Ok(ModelKind::Effective),
            "semiclassical" => Ok(ModelKind::Semiclassical),
            other => Err(format!("model must be full, effective or semiclassical, got `{other}`")),
        }
    }
}

/// Initial state of `evolve`: qubit level and empty cavity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    E0,
    G0,
}

impl InitialState {
    pub fn label(self) -> &'static str {
        match self {
            InitialState::E0 => "e0",
            InitialState::G0 => "g0",
        }
    }

    /// Qubit index, 1 for `|e>`.
    pub fn qubit(self) -> usize {
        match self {
            InitialState::E0 => 1,
            InitialState::G0 => 0,
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "e0" => Ok(InitialState::E0),
            "g0" => Ok(InitialState::G0),
            other => Err(format!("init must be e0 or g0, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub preset: Option<String>,
    pub phys: PhysicalParams,
    /// Evolve under `-H`, inherited from the preset.
    pub negate: bool,
    pub n_max: usize,
    /// μs.
    pub t_max: f64,
    /// μs.
    pub sample_dt: f64,
    pub init: InitialState,
    /// Empty selects the model's default set.
    pub observables: Vec<String>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

pub const KEYS: [&str; 18] = [
    "model",
    "preset",
    "g_cav",
    "omega1",
    "omega2",
    "delta1",
    "delta2",
    "delta",
    "delta_cav",
    "kappa",
    "gamma",
    "n_max",
    "t_max",
    "sample_dt",
    "init",
    "observables",
    "out",
    "svg",
];

const PHYSICAL_KEYS: [&str; 8] = ["g_cav", "omega1", "omega2", "delta1", "delta2", "delta", "delta_cav", "kappa"];

impl ModelKind {
    pub fn default_n_max(self) -> usize {
        match self {
            ModelKind::Full => 8,
            ModelKind::Effective | ModelKind::Semiclassical => 40,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::Config(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt.is_finite()) {
            return Err(Error::Config(format!("sample_dt must be positive, got {}", self.sample_dt)));
        }
        if self.phys.kappa < 0.0 || self.phys.gamma < 0.0 {
            return Err(Error::Config("kappa and gamma must be non-negative".into()));
        }
        Ok(())
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn typed<T: FromStr>(key: &str, e: &Entry) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    e.value.parse::<T>().map_err(|err| Error::Parse { line: e.line, msg: format!("{key}: {err}") })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected key=value, got `{content}`") })?;
        let key = key.trim();
        let value = value.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::Parse { line, msg: format!("unknown key `{key}`") })?;
        if value.is_empty() {
            return Err(Error::Parse { line, msg: format!("empty value for `{key}`") });
        }
        if entries.insert(known, Entry { line, value: value.to_string() }).is_some() {
            return Err(Error::Parse { line, msg: format!("duplicate key `{key}`") });
        }
    }

    let mut missing: Vec<&str> = ["model", "t_max"].into_iter().filter(|k| !entries.contains_key(k)).collect();
    if !entries.contains_key("preset") {
        missing.extend(PHYSICAL_KEYS.iter().filter(|k| !entries.contains_key(*k)));
    }
    if !missing.is_empty() {
        return Err(Error::Parse {
            line: last_line + 1,
            msg: format!("missing required keys: {}", missing.join(", ")),
        });
    }

    let get = |k: &str| entries.get(k);
    let model: ModelKind = typed("model", &entries["model"])?;
    let (mut phys, negate, preset) = match get("preset") {
        Some(e) => {
            let p = find_preset(&e.value).map_err(|err| Error::Parse { line: e.line, msg: err.to_string() })?;
            (p.phys, p.negate, Some(p.name.to_string()))
        }
        None => {
            let atom = AtomConstants::default();
            let zero = PhysicalParams {
                g_cav: 0.0,
                omega1: 0.0,
                omega2: 0.0,
                delta1: 0.0,
                delta2: 0.0,
                delta: 0.0,
                delta_cav: 0.0,
                kappa: 0.0,
                gamma: atom.gamma,
                atom,
            };
            (zero, false, None)
        }
    };
    let fields: [(&str, &mut f64); 9] = [
        ("g_cav", &mut phys.g_cav),
        ("omega1", &mut phys.omega1),
        ("omega2", &mut phys.omega2),
        ("delta1", &mut phys.delta1),
        ("delta2", &mut phys.delta2),
        ("delta", &mut phys.delta),
        ("delta_cav", &mut phys.delta_cav),
        ("kappa", &mut phys.kappa),
        ("gamma", &mut phys.gamma),
    ];
    for (key, slot) in fields {
        if let Some(e) = get(key) {
            *slot = typed(key, e)?;
        }
    }

    let config = RunConfig {
        model,
        preset,
        phys,
        negate,
        n_max: get("n_max").map(|e| typed("n_max", e)).transpose()?.unwrap_or(model.default_n_max()),
        t_max: typed("t_max", &entries["t_max"])?,
        sample_dt: get("sample_dt").map(|e| typed("sample_dt", e)).transpose()?.unwrap_or(0.01),
        init: get("init").map(|e| typed("init", e)).transpose()?.unwrap_or(InitialState::E0),
        observables: get("observables")
            .map(|e| e.value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default(),
        out: get("out").map(|e| PathBuf::from(&e.value)),
        svg: get("svg").map(|e| PathBuf::from(&e.value)),
    };
    config.validate().map_err(|err| {
        let line = ["n_max", "t_max", "sample_dt", "kappa", "gamma"]
            .iter()
            .filter_map(|k| get(k).map(|e| e.line))
            .max()
            .unwrap_or(last_line);
        Error::Parse { line, msg: err.to_string() }
    })?;
    Ok(config)
}
