//! Line-oriented `key = value` run configuration.
//!
//! Every key has a default, a typed range and a one-line description in
//! [`KEYS`]. Text after `#` is a comment. Absent keys take their default;
//! unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use motility_core::domain::{InitialDataSpec, ModelParams, SpaceGrid, ThetaGrid, TraitProfile};
use motility_core::hj::{HjOptions, NumericalFlux};
use motility_core::pde::{Scheme, SimConfig};
use motility_core::spectral::CstarOptions;
use motility_core::verify::{CheckKind, HjCheckConfig, SweepConfig, VerifyConfig};
use thiserror::Error;

use crate::output::fmt_f64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    /// Real number in a range; `open_min`/`open_max` exclude the end.
    Float {
        min: f64,
        max: f64,
        open_min: bool,
        open_max: bool,
    },
    Int {
        min: u64,
        max: u64,
    },
    Choice(&'static [&'static str]),
    /// Comma-separated reals, each in `(min, max]`.
    FloatList {
        min: f64,
        max: f64,
    },
    /// Comma-separated names from a fixed set.
    ChoiceList(&'static [&'static str]),
    Path,
}

pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub kind: Kind,
    pub doc: &'static str,
}

const INF: f64 = f64::INFINITY;

const fn positive() -> Kind {
    Kind::Float {
        min: 0.0,
        max: INF,
        open_min: true,
        open_max: true,
    }
}

const fn finite() -> Kind {
    Kind::Float {
        min: -INF,
        max: INF,
        open_min: true,
        open_max: true,
    }
}

const fn closed(min: f64, max: f64) -> Kind {
    Kind::Float {
        min,
        max,
        open_min: false,
        open_max: false,
    }
}

const fn half_open(min: f64, max: f64) -> Kind {
    Kind::Float {
        min,
        max,
        open_min: true,
        open_max: false,
    }
}

const fn int(min: u64, max: u64) -> Kind {
    Kind::Int { min, max }
}

const CHECK_NAMES: &[&str] = &[
    "cstar_bounds",
    "front_speed",
    "sup_bound",
    "theorem_regions",
    "gradient_scaling",
    "hj_agreement",
];

macro_rules! key {
    ($name:literal, $default:literal, $kind:expr, $doc:literal) => {
        KeySpec {
            name: $name,
            default: $default,
            kind: $kind,
            doc: $doc,
        }
    };
}

/// All recognised keys, in serialization order.
pub const KEYS: &[KeySpec] = &[
    key!("theta_min", "1", positive(), "smallest motility trait"),
    key!(
        "theta_max",
        "2",
        positive(),
        "largest motility trait, above theta_min"
    ),
    key!("alpha", "1", positive(), "mutation rate"),
    key!("r", "1", positive(), "net reproduction rate"),
    key!(
        "theta_nodes",
        "81",
        int(3, 1_000_000),
        "trait nodes of the spectral solver"
    ),
    key!(
        "lambda_min",
        "0.05",
        positive(),
        "smallest wave number in dispersion.csv"
    ),
    key!(
        "lambda_max",
        "10",
        positive(),
        "largest wave number in dispersion.csv"
    ),
    key!(
        "lambda_samples",
        "50",
        int(2, 1_000_000),
        "log-spaced rows of dispersion.csv"
    ),
    key!(
        "cstar_scan_points",
        "48",
        int(8, 1_000_000),
        "wave numbers of the c* bracketing scan"
    ),
    key!(
        "cstar_rel_width",
        "1e-8",
        half_open(0.0, 0.1),
        "relative bracket width ending the c* search"
    ),
    key!(
        "epsilon",
        "1",
        half_open(0.0, 1.0),
        "scaling parameter of the simulation"
    ),
    key!("x_min", "-10", finite(), "left end of the space grid"),
    key!("x_max", "90", finite(), "right end of the space grid"),
    key!("x_nodes", "1001", int(3, 100_000_000), "space nodes"),
    key!(
        "sim_theta_nodes",
        "21",
        int(3, 1_000_000),
        "trait nodes of the simulation"
    ),
    key!("horizon", "30", closed(0.0, INF), "final time"),
    key!(
        "cfl_factor",
        "0.4",
        Kind::Float {
            min: 0.0,
            max: 1.0,
            open_min: true,
            open_max: true
        },
        "fraction of the stability limit used as time step"
    ),
    key!(
        "scheme",
        "imex",
        Kind::Choice(&["imex", "explicit"]),
        "time integrator"
    ),
    key!(
        "implicit_weight",
        "0.5",
        closed(0.5, 1.0),
        "implicit weight of the trait diffusion in the imex scheme"
    ),
    key!(
        "snapshot_stride",
        "5000",
        int(1, u64::MAX),
        "steps between snapshot files"
    ),
    key!(
        "x_center",
        "0",
        finite(),
        "centre of the initial spatial bump"
    ),
    key!(
        "x_halfwidth",
        "2",
        positive(),
        "half-width of the initial spatial bump"
    ),
    key!("amplitude", "1", closed(0.0, INF), "peak initial density"),
    key!(
        "trait_profile",
        "uniform",
        Kind::Choice(&["uniform", "cosine_bump"]),
        "initial trait profile"
    ),
    key!(
        "bump_center",
        "1.5",
        finite(),
        "centre of the cosine_bump trait profile"
    ),
    key!(
        "bump_halfwidth",
        "0.5",
        positive(),
        "half-width of the cosine_bump trait profile"
    ),
    key!(
        "hj_omega_min",
        "-1",
        finite(),
        "left end of the initial zero set"
    ),
    key!(
        "hj_omega_max",
        "1",
        finite(),
        "right end of the initial zero set"
    ),
    key!("hj_x_min", "-12", finite(), "left end of the HJ grid"),
    key!("hj_x_max", "12", finite(), "right end of the HJ grid"),
    key!("hj_dx", "0.05", positive(), "coarse HJ grid step"),
    key!(
        "hj_reach",
        "5",
        positive(),
        "distance c* T travelled by the front at the final time"
    ),
    key!(
        "hj_mu_list",
        "10,40,160",
        Kind::FloatList { min: 0.0, max: INF },
        "increasing cutoff amplitudes"
    ),
    key!("hj_ramp_width", "4", positive(), "width of the cutoff ramp"),
    key!(
        "hj_cfl",
        "0.9",
        half_open(0.0, 1.0),
        "fraction of the HJ monotonicity limit used as time step"
    ),
    key!(
        "hj_flux",
        "godunov",
        Kind::Choice(&["godunov", "lax_friedrichs"]),
        "numerical Hamiltonian"
    ),
    key!(
        "hj_table_step",
        "0.02",
        half_open(0.0, 1.0),
        "largest step of the tabulated Hamiltonian"
    ),
    key!(
        "verify_checks",
        "cstar_bounds,front_speed,sup_bound,theorem_regions,gradient_scaling,hj_agreement",
        Kind::ChoiceList(CHECK_NAMES),
        "checks run by verify"
    ),
    key!(
        "sup_epsilons",
        "1,0.5,0.25",
        Kind::FloatList { min: 0.0, max: 1.0 },
        "epsilons of the sup bound check"
    ),
    key!(
        "sup_x_min",
        "-10",
        finite(),
        "left end of the sup check grid"
    ),
    key!(
        "sup_x_max",
        "40",
        finite(),
        "right end of the sup check grid"
    ),
    key!(
        "sup_x_nodes",
        "801",
        int(3, 100_000_000),
        "space nodes of the sup check"
    ),
    key!(
        "sup_horizon",
        "10",
        positive(),
        "final time of the sup check"
    ),
    key!(
        "sweep_epsilons",
        "0.2,0.1,0.05,0.025",
        Kind::FloatList { min: 0.0, max: 1.0 },
        "epsilons of the shared region and gradient sweep"
    ),
    key!("sweep_x_min", "-3", finite(), "left end of the sweep grid"),
    key!("sweep_x_max", "7", finite(), "right end of the sweep grid"),
    key!(
        "sweep_dx_per_epsilon",
        "0.125",
        positive(),
        "sweep space step divided by epsilon"
    ),
    key!(
        "sweep_theta_nodes",
        "21",
        int(3, 1_000_000),
        "trait nodes of the sweep"
    ),
    key!(
        "sweep_horizon",
        "1.5",
        positive(),
        "final time of the sweep"
    ),
    key!(
        "sweep_x_center",
        "0",
        finite(),
        "centre of the sweep initial bump"
    ),
    key!(
        "sweep_x_halfwidth",
        "0.5",
        positive(),
        "half-width of the sweep initial bump"
    ),
    key!(
        "sweep_amplitude",
        "1",
        positive(),
        "peak initial density of the sweep"
    ),
    key!(
        "region_min_epsilon",
        "0.05",
        half_open(0.0, 1.0),
        "smallest epsilon probed by the region check"
    ),
    key!(
        "region_margin",
        "0.3",
        Kind::Float {
            min: 0.0,
            max: 0.5,
            open_min: true,
            open_max: true
        },
        "relative margin of the region probes"
    ),
    key!(
        "region_neighbourhood",
        "2",
        int(0, 1_000_000),
        "half-width in nodes of the neighbourhood maximum"
    ),
    key!(
        "gradient_window_min",
        "2",
        finite(),
        "left end of the gradient measurement window"
    ),
    key!(
        "gradient_window_max",
        "3",
        finite(),
        "right end of the gradient measurement window"
    ),
    key!(
        "cstar_shift",
        "0",
        finite(),
        "translation of the expected c* interval, for failure drills"
    ),
    key!(
        "workers",
        "0",
        int(0, 4096),
        "worker threads, 0 for one per core"
    ),
    key!(
        "out_dir",
        ".",
        Kind::Path,
        "existing directory receiving the output files"
    ),
];

fn spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Float(f64),
    Int(u64),
    Text(String),
    Floats(Vec<f64>),
    Texts(Vec<String>),
}

fn describe(kind: &Kind) -> String {
    match *kind {
        Kind::Float {
            min,
            max,
            open_min,
            open_max,
        } => {
            let lo = if open_min { '(' } else { '[' };
            let hi = if open_max { ')' } else { ']' };
            format!(
                "a real number in {lo}{}, {}{hi}",
                fmt_f64(min),
                fmt_f64(max)
            )
        }
        Kind::Int { min, max } => format!("an integer in [{min}, {max}]"),
        Kind::Choice(c) => format!("one of {}", c.join(", ")),
        Kind::FloatList { min, max } => {
            format!(
                "a comma-separated list of reals in ({}, {}]",
                fmt_f64(min),
                fmt_f64(max)
            )
        }
        Kind::ChoiceList(c) => format!("a comma-separated list drawn from {}", c.join(", ")),
        Kind::Path => "a path".to_string(),
    }
}

fn parse_value(spec: &KeySpec, text: &str) -> Result<Value, String> {
    let bad = || {
        format!(
            "{} = {text:?}: expected {}",
            spec.name,
            describe(&spec.kind)
        )
    };
    match spec.kind {
        Kind::Float {
            min,
            max,
            open_min,
            open_max,
        } => {
            let v: f64 = text.parse().map_err(|_| bad())?;
            let above = if open_min { v > min } else { v >= min };
            let below = if open_max { v < max } else { v <= max };
            if v.is_finite() && above && below {
                Ok(Value::Float(v))
            } else {
                Err(bad())
            }
        }
        Kind::Int { min, max } => match text.parse::<u64>() {
            Ok(v) if (min..=max).contains(&v) => Ok(Value::Int(v)),
            _ => Err(bad()),
        },
        Kind::Choice(choices) => {
            if choices.contains(&text) {
                Ok(Value::Text(text.to_string()))
            } else {
                Err(bad())
            }
        }
        Kind::FloatList { min, max } => {
            let mut out = Vec::new();
            for item in text.split(',') {
                let v: f64 = item.trim().parse().map_err(|_| bad())?;
                if !(v.is_finite() && v > min && v <= max) {
                    return Err(bad());
                }
                out.push(v);
            }
            Ok(Value::Floats(out))
        }
        Kind::ChoiceList(choices) => {
            let mut out = Vec::new();
            for item in text.split(',') {
                let item = item.trim();
                if !choices.contains(&item) {
                    return Err(bad());
                }
                out.push(item.to_string());
            }
            Ok(Value::Texts(out))
        }
        Kind::Path => {
            if text.is_empty() {
                Err(bad())
            } else {
                Ok(Value::Text(text.to_string()))
            }
        }
    }
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Float(x) => fmt_f64(*x),
        Value::Int(n) => n.to_string(),
        Value::Text(s) => s.clone(),
        Value::Floats(xs) => xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","),
        Value::Texts(ss) => ss.join(","),
    }
}

/// A fully validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::builder().finish().expect("defaults are valid")
    }
}

/// Accumulates assignments before the cross-key validation.
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, Value>,
}

impl ConfigBuilder {
    /// Parses `key = value` lines; `source_name` labels errors.
    pub fn apply_text(&mut self, source_name: &str, text: &str) -> Result<&mut Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            self.assign(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(self)
    }

    /// Applies one `key=value` override.
    pub fn apply_override(
        &mut self,
        index: usize,
        assignment: &str,
    ) -> Result<&mut Self, ConfigError> {
        self.apply_text(&format!("--set #{}", index + 1), assignment)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<&mut Self, ConfigError> {
        self.assign(key, value).map_err(ConfigError::Invalid)?;
        Ok(self)
    }

    fn assign(&mut self, key: &str, value: &str) -> Result<(), String> {
        let spec = spec(key).ok_or_else(|| format!("unknown key {key:?}"))?;
        let v = parse_value(spec, value)?;
        self.values.insert(spec.name, v);
        Ok(())
    }

    pub fn finish(&self) -> Result<RunConfig, ConfigError> {
        let cfg = RunConfig {
            values: self.values.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_order(cfg: &RunConfig, lo: &str, hi: &str) -> Result<(), ConfigError> {
    let (a, b) = (cfg.f(lo), cfg.f(hi));
    if a < b {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!(
            "{lo} = {} must be below {hi} = {}",
            fmt_f64(a),
            fmt_f64(b)
        )))
    }
}

fn core_error(e: motility_core::Error) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

impl RunConfig {
    /// Starts from the defaults.
    pub fn builder() -> ConfigBuilder {
        let values = KEYS
            .iter()
            .map(|k| (k.name, parse_value(k, k.default).expect("default parses")))
            .collect();
        ConfigBuilder { values }
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        Self::builder().apply_text("<config>", text)?.finish()
    }

    /// Reads `path` (if any), then applies the `key=value` overrides in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut b = Self::builder();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            b.apply_text(&path.display().to_string(), &text)?;
        }
        for (i, o) in overrides.iter().enumerate() {
            b.apply_override(i, o)?;
        }
        b.finish()
    }

    /// Every key, one per line, in a form [`RunConfig::parse_str`] reads back
    /// to an equal configuration.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            let _ = writeln!(out, "{} = {}", k.name, format_value(&self.values[k.name]));
        }
        out
    }

    /// Reference listing of keys, defaults and ranges.
    pub fn reference() -> String {
        let mut out = String::new();
        for k in KEYS {
            let _ = writeln!(out, "# {}; {}", k.doc, describe(&k.kind));
            let _ = writeln!(out, "{} = {}", k.name, k.default);
        }
        out
    }

    fn f(&self, key: &str) -> f64 {
        match &self.values[key] {
            Value::Float(v) => *v,
            other => panic!("{key} is not a real: {other:?}"),
        }
    }

    fn n(&self, key: &str) -> usize {
        match &self.values[key] {
            Value::Int(v) => usize::try_from(*v).unwrap_or(usize::MAX),
            other => panic!("{key} is not an integer: {other:?}"),
        }
    }

    fn text(&self, key: &str) -> &str {
        match &self.values[key] {
            Value::Text(v) => v,
            other => panic!("{key} is not text: {other:?}"),
        }
    }

    fn floats(&self, key: &str) -> &[f64] {
        match &self.values[key] {
            Value::Floats(v) => v,
            other => panic!("{key} is not a list: {other:?}"),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (lo, hi) in [
            ("theta_min", "theta_max"),
            ("lambda_min", "lambda_max"),
            ("x_min", "x_max"),
            ("hj_omega_min", "hj_omega_max"),
            ("hj_x_min", "hj_x_max"),
            ("sup_x_min", "sup_x_max"),
            ("sweep_x_min", "sweep_x_max"),
            ("gradient_window_min", "gradient_window_max"),
        ] {
            check_order(self, lo, hi)?;
        }
        let mu = self.floats("hj_mu_list");
        if mu.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid(format!(
                "hj_mu_list = {} must be strictly increasing",
                format_value(&self.values["hj_mu_list"])
            )));
        }
        if self.hj_omega().0 <= self.f("hj_x_min") || self.hj_omega().1 >= self.f("hj_x_max") {
            return Err(ConfigError::Invalid(
                "hj_omega_min and hj_omega_max must lie inside (hj_x_min, hj_x_max)".into(),
            ));
        }
        self.sim_config()?.validate().map_err(core_error)?;
        let v = self.verify_config()?;
        v.sup.validate().map_err(core_error)?;
        for &e in &v.sweep_epsilons {
            v.sweep.sim_config(e).map_err(core_error)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(
            self.f("theta_min"),
            self.f("theta_max"),
            self.f("alpha"),
            self.f("r"),
        )
        .map_err(core_error)
    }

    pub fn theta_grid(&self) -> Result<ThetaGrid, ConfigError> {
        ThetaGrid::new(&self.params()?, self.n("theta_nodes")).map_err(core_error)
    }

    pub fn cstar_options(&self) -> CstarOptions {
        CstarOptions {
            scan_points: self.n("cstar_scan_points"),
            rel_width: self.f("cstar_rel_width"),
        }
    }

    /// Log-spaced wave numbers of dispersion.csv.
    pub fn lambdas(&self) -> Vec<f64> {
        let (a, b, n) = (
            self.f("lambda_min").ln(),
            self.f("lambda_max").ln(),
            self.n("lambda_samples"),
        );
        let mut out: Vec<f64> = (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect();
        out[0] = self.f("lambda_min");
        out[n - 1] = self.f("lambda_max");
        out
    }

    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        let params = self.params()?;
        let profile = match self.text("trait_profile") {
            "cosine_bump" => TraitProfile::CosineBump {
                center: self.f("bump_center"),
                halfwidth: self.f("bump_halfwidth"),
            },
            _ => TraitProfile::Uniform,
        };
        Ok(SimConfig {
            params,
            space: SpaceGrid::new(self.f("x_min"), self.f("x_max"), self.n("x_nodes"))
                .map_err(core_error)?,
            theta: ThetaGrid::new(&params, self.n("sim_theta_nodes")).map_err(core_error)?,
            epsilon: self.f("epsilon"),
            horizon: self.f("horizon"),
            cfl_factor: self.f("cfl_factor"),
            scheme: match self.text("scheme") {
                "explicit" => Scheme::Explicit,
                _ => Scheme::ImexThetaImplicit,
            },
            snapshot_stride: self.n("snapshot_stride"),
            initial: InitialDataSpec {
                x_center: self.f("x_center"),
                x_halfwidth: self.f("x_halfwidth"),
                amplitude: self.f("amplitude"),
                profile,
            },
            implicit_weight: self.f("implicit_weight"),
            ..SimConfig::default()
        })
    }

    pub fn hj_omega(&self) -> (f64, f64) {
        (self.f("hj_omega_min"), self.f("hj_omega_max"))
    }

    pub fn hj_config(&self) -> HjCheckConfig {
        HjCheckConfig {
            omega: self.hj_omega(),
            x_min: self.f("hj_x_min"),
            x_max: self.f("hj_x_max"),
            dx: self.f("hj_dx"),
            reach: self.f("hj_reach"),
            mu_list: self.floats("hj_mu_list").to_vec(),
            options: HjOptions {
                ramp_width: self.f("hj_ramp_width"),
                cfl: self.f("hj_cfl"),
                flux: match self.text("hj_flux") {
                    "lax_friedrichs" => NumericalFlux::LaxFriedrichs,
                    _ => NumericalFlux::Godunov,
                },
            },
            table_step: self.f("hj_table_step"),
        }
    }

    pub fn verify_config(&self) -> Result<VerifyConfig, ConfigError> {
        let params = self.params()?;
        let sim = self.sim_config()?;
        let checks = match &self.values["verify_checks"] {
            Value::Texts(names) => names
                .iter()
                .filter_map(|n| CheckKind::from_name(n))
                .collect(),
            _ => unreachable!("verify_checks is a list"),
        };
        let sup = SimConfig {
            space: SpaceGrid::new(
                self.f("sup_x_min"),
                self.f("sup_x_max"),
                self.n("sup_x_nodes"),
            )
            .map_err(core_error)?,
            horizon: self.f("sup_horizon"),
            snapshot_stride: usize::MAX,
            ..sim
        };
        let sweep = SweepConfig {
            params,
            x_min: self.f("sweep_x_min"),
            x_max: self.f("sweep_x_max"),
            dx_per_epsilon: self.f("sweep_dx_per_epsilon"),
            theta_nodes: self.n("sweep_theta_nodes"),
            horizon: self.f("sweep_horizon"),
            initial: InitialDataSpec {
                x_center: self.f("sweep_x_center"),
                x_halfwidth: self.f("sweep_x_halfwidth"),
                amplitude: self.f("sweep_amplitude"),
                profile: TraitProfile::Uniform,
            },
            cfl_factor: self.f("cfl_factor"),
        };
        Ok(VerifyConfig {
            params,
            checks,
            front: SimConfig {
                snapshot_stride: usize::MAX,
                ..sim
            },
            sup,
            sup_epsilons: self.floats("sup_epsilons").to_vec(),
            sweep,
            sweep_epsilons: self.floats("sweep_epsilons").to_vec(),
            region_min_epsilon: self.f("region_min_epsilon"),
            margin: self.f("region_margin"),
            neighbourhood: self.n("region_neighbourhood"),
            gradient_window: (self.f("gradient_window_min"), self.f("gradient_window_max")),
            hj: self.hj_config(),
            cstar_shift: self.f("cstar_shift"),
        })
    }

    /// Worker threads; 0 means the rayon default.
    pub fn workers(&self) -> usize {
        self.n("workers")
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.text("out_dir"))
    }
}
