//! Run configuration and its flat `key = value` file form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use qrabi_core::ModelParams;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Energy levels, optionally swept over a parameter
    Spectrum,
    /// Population difference ⟨σz(t)⟩ from |↑⟩|0⟩
    Dynamics,
    /// Rabi frequencies of the RWA three-state expansion
    Rabi,
    /// Vacuum Rabi splitting (emission spectrum of |↑⟩|0⟩)
    Splitting,
    /// Invariant and cross-solver checks, JSON report
    Validate,
    /// Regenerate the data of a figure preset
    Reproduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Method {
    Fock,
    Bogoliubov,
    Adiabatic,
    Rwa,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Delta,
    G1,
    G2,
    Epsilon,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn parse_value<T: ValueEnum>(s: &str, what: &str) -> Result<T> {
    T::from_str(s.trim(), true).map_err(|_| CliError::Usage(format!("unknown {what} `{s}`")))
}

/// `param:start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    pub fn new(param: SweepParam, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::Usage("sweep bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(CliError::Usage(format!("sweep step must be positive, got {step}")));
        }
        if stop < start {
            return Err(CliError::Usage(format!("sweep stop {stop} is below start {start}")));
        }
        Ok(Sweep { param, start, stop, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }

    pub fn apply(&self, params: ModelParams, value: f64) -> Result<ModelParams> {
        let p = match self.param {
            SweepParam::Delta => params.set_delta(value),
            SweepParam::G1 => params.set_g1(value),
            SweepParam::G2 => params.set_g2(value),
            SweepParam::Epsilon => params.set_epsilon(value),
        };
        p.map_err(CliError::Params)
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", value_name(&self.param), self.start, self.stop, self.step)
    }
}

impl FromStr for Sweep {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Usage(format!("sweep must be param:start:stop:step, got `{s}`")));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad sweep number `{x}`")));
        Sweep::new(parse_value(parts[0], "sweep parameter")?, num(parts[1])?, num(parts[2])?, num(parts[3])?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub sweep: Option<Sweep>,
    pub n_tr: usize,
    /// Empty selects the command's default methods.
    pub methods: Vec<Method>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
    pub preset: Option<Preset>,
    /// Levels reported per point by `spectrum` and `rabi`.
    pub levels: usize,
    pub t_max: f64,
    pub dt: f64,
    /// Manifolds kept by the non-RWA emission spectrum.
    pub m_max: usize,
    /// Perturbs one overlap-matrix entry before `validate` checks it.
    pub inject_fault: bool,
}

pub const DEFAULT_N_TR: usize = 60;
pub const DEFAULT_LEVELS: usize = 12;
pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_M_MAX: usize = 60;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            params: ModelParams::new(1.0, 0.0, 0.0).expect("valid defaults"),
            sweep: None,
            n_tr: DEFAULT_N_TR,
            methods: Vec::new(),
            out: None,
            format: Format::Csv,
            jobs: None,
            preset: None,
            levels: DEFAULT_LEVELS,
            t_max: DEFAULT_T_MAX,
            dt: DEFAULT_DT,
            m_max: DEFAULT_M_MAX,
            inject_fault: false,
        }
    }

    /// Checks everything that can be checked before a solve, including every
    /// sweep point's parameters.
    pub fn validate(&self) -> Result<()> {
        if self.n_tr < qrabi_core::model::MIN_TRUNCATION {
            return Err(CliError::Usage(format!("ntr must be at least {}", qrabi_core::model::MIN_TRUNCATION)));
        }
        if self.levels == 0 || self.levels > self.n_tr {
            return Err(CliError::Usage(format!("levels must be in 1..={}", self.n_tr)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Usage("need dt > 0 and t-max >= 0".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be positive".into()));
        }
        if let Some(s) = &self.sweep {
            for v in s.values() {
                s.apply(self.params, v)?;
            }
        }
        match self.command {
            Command::Reproduce if self.preset.is_none() => {
                return Err(CliError::Usage("reproduce needs --preset".into()));
            }
            Command::Dynamics => {
                self.dynamics_method()?;
            }
            _ => {}
        }
        Ok(())
    }

    pub fn methods_or(&self, default: &[Method]) -> Vec<Method> {
        let mut m = if self.methods.is_empty() { default.to_vec() } else { self.methods.clone() };
        m.sort();
        m.dedup();
        m
    }

    /// Dynamics compares one analytic scheme with its exact counterpart.
    pub fn dynamics_method(&self) -> Result<Method> {
        match self.methods_or(&[Method::Adiabatic]).as_slice() {
            [m @ (Method::Adiabatic | Method::Rwa)] => Ok(*m),
            _ => Err(CliError::Usage("dynamics takes exactly one method: adiabatic or rwa".into())),
        }
    }

    /// Flat `key = value` lines, one per set field.
    pub fn to_config_string(&self) -> String {
        let mut lines = vec![
            format!("command = {}", value_name(&self.command)),
            format!("delta = {}", self.params.delta()),
            format!("g1 = {}", self.params.g1()),
            format!("g2 = {}", self.params.g2()),
            format!("epsilon = {}", self.params.epsilon()),
        ];
        if let Some(s) = &self.sweep {
            lines.push(format!("sweep = {s}"));
        }
        lines.push(format!("ntr = {}", self.n_tr));
        if !self.methods.is_empty() {
            let m: Vec<String> = self.methods.iter().map(value_name).collect();
            lines.push(format!("methods = {}", m.join(",")));
        }
        if let Some(o) = &self.out {
            lines.push(format!("out = {}", o.display()));
        }
        lines.push(format!("format = {}", value_name(&self.format)));
        if let Some(j) = self.jobs {
            lines.push(format!("jobs = {j}"));
        }
        if let Some(p) = &self.preset {
            lines.push(format!("preset = {}", value_name(p)));
        }
        lines.push(format!("levels = {}", self.levels));
        lines.push(format!("t-max = {}", self.t_max));
        lines.push(format!("dt = {}", self.dt));
        lines.push(format!("m-max = {}", self.m_max));
        lines.push(format!("inject-fault = {}", self.inject_fault));
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }

    /// Parses a config file. `#` starts a comment; `command` is required.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg: Option<RunConfig> = None;
        let mut pending = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "command" {
                cfg = Some(RunConfig::new(parse_value(value, "command")?));
            } else {
                pending.push((key.to_string(), value.to_string()));
            }
        }
        let mut cfg = cfg.ok_or_else(|| CliError::Usage("config has no `command`".into()))?;
        let (mut delta, mut g1, mut g2, mut eps) =
            (cfg.params.delta(), cfg.params.g1(), cfg.params.g2(), cfg.params.epsilon());
        for (key, value) in pending {
            let float = || value.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number for {key}: `{value}`")));
            let uint = || value.parse::<usize>().map_err(|_| CliError::Usage(format!("bad integer for {key}: `{value}`")));
            match key.as_str() {
                "delta" => delta = float()?,
                "g1" => g1 = float()?,
                "g2" => g2 = float()?,
                "epsilon" => eps = float()?,
                "sweep" => cfg.sweep = Some(value.parse()?),
                "ntr" => cfg.n_tr = uint()?,
                "methods" => cfg.methods = parse_methods(&value)?,
                "out" => cfg.out = Some(PathBuf::from(&value)),
                "format" => cfg.format = parse_value(&value, "format")?,
                "jobs" => cfg.jobs = Some(uint()?),
                "preset" => cfg.preset = Some(parse_value(&value, "preset")?),
                "levels" => cfg.levels = uint()?,
                "t-max" => cfg.t_max = float()?,
                "dt" => cfg.dt = float()?,
                "m-max" => cfg.m_max = uint()?,
                "inject-fault" => {
                    cfg.inject_fault = value.parse().map_err(|_| CliError::Usage(format!("bad boolean `{value}`")))?
                }
                _ => return Err(CliError::Usage(format!("unknown config key `{key}`"))),
            }
        }
        cfg.params = ModelParams::with_bias(delta, g1, g2, eps).map_err(CliError::Params)?;
        Ok(cfg)
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_value(x, "method")).collect()
}

pub fn name_of<T: ValueEnum>(v: &T) -> String {
    value_name(v)
}
