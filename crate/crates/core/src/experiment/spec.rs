//! Experiment files: network keys plus run-control keys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::config::{parse_kv, ConfigError, NetworkConfig, ValidatedConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Meanfield,
    Analyze,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Meanfield => "meanfield",
            Mode::Analyze => "analyze",
            Mode::Sweep => "sweep",
        }
    }

    pub fn wants_sim(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Sweep)
    }

    pub fn wants_meanfield(self) -> bool {
        matches!(self, Mode::Meanfield | Mode::Sweep)
    }

    pub fn wants_analysis(self) -> bool {
        matches!(self, Mode::Analyze | Mode::Sweep)
    }
}

impl FromStr for Mode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "meanfield" => Ok(Mode::Meanfield),
            "analyze" => Ok(Mode::Analyze),
            "sweep" => Ok(Mode::Sweep),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Xi,
    P,
    Lambda,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Xi => "xi",
            Axis::P => "p",
            Axis::Lambda => "lambda",
        }
    }

    pub fn set(self, cfg: &mut NetworkConfig, v: f64) {
        match self {
            Axis::Xi => cfg.xi = v,
            Axis::P => cfg.p = v,
            Axis::Lambda => cfg.lambda = v,
        }
    }
}

impl FromStr for Axis {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "xi" => Ok(Axis::Xi),
            "p" => Ok(Axis::P),
            "lambda" => Ok(Axis::Lambda),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: ValidatedConfig,
    pub mode: Mode,
    pub sweep: Option<Sweep>,
    pub topology_count: usize,
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_TOPOLOGIES: usize = 20;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl ExperimentSpec {
    /// Configuration of each row, in sweep order; one row without a sweep.
    pub fn rows(&self) -> Vec<(Option<f64>, ValidatedConfig)> {
        match &self.sweep {
            None => vec![(None, self.base.clone())],
            Some(s) => s
                .values
                .iter()
                .map(|&v| {
                    let cfg = self.base.with(|c| s.axis.set(c, v)).expect("sweep values validated at parse time");
                    (Some(v), cfg)
                })
                .collect(),
        }
    }
}

pub fn parse_spec(path: &Path) -> Result<ExperimentSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_spec_str(&text)?)
}

fn malformed(line: usize, key: &str, value: &str) -> ConfigError {
    ConfigError::Malformed { line, key: key.to_string(), value: value.to_string() }
}

fn at(line: usize, e: ConfigError) -> ConfigError {
    ConfigError::AtLine { line, source: Box::new(e) }
}

pub fn parse_spec_str(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let mut cfg = NetworkConfig::default();
    let mut mode = Mode::Sweep;
    let mut mode_given = false;
    let mut axis: Option<(usize, Axis)> = None;
    let mut values: Option<(usize, Vec<f64>)> = None;
    let mut topology_count = DEFAULT_TOPOLOGIES;
    let mut output_path = None;
    let mut seen: Vec<String> = Vec::new();
    let mut lines: Vec<(&'static str, usize)> = Vec::new();

    for e in parse_kv(text)? {
        if seen.contains(&e.key) {
            return Err(ConfigError::Duplicate { line: e.line, key: e.key });
        }
        let (line, key, value) = (e.line, e.key.as_str(), e.value.as_str());
        match key {
            "mode" => {
                mode = value.parse().map_err(|_| malformed(line, key, value))?;
                mode_given = true;
            }
            "sweep_axis" => axis = Some((line, value.parse().map_err(|_| malformed(line, key, value))?)),
            "sweep_values" => {
                let v: Result<Vec<f64>, _> = value
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or(()))
                    .collect();
                values = Some((line, v.map_err(|_| malformed(line, key, value))?));
            }
            "topology_count" => {
                topology_count = value.parse().map_err(|_| malformed(line, key, value))?;
                if topology_count == 0 {
                    return Err(at(
                        line,
                        ConfigError::OutOfRange { field: "topology_count", message: "topology_count out of [1,inf)".into() },
                    ));
                }
            }
            "output_path" => output_path = Some(PathBuf::from(value)),
            _ => {
                if !cfg.apply(key, value, line)? {
                    return Err(ConfigError::UnknownKey { line, key: e.key });
                }
                let field = match key {
                    "theta_db" => "theta",
                    "p_tx_dbm" => "p_tx",
                    "noise_dbm" => "noise",
                    k => crate::config::NETWORK_KEYS.iter().find(|n| **n == k).copied().unwrap_or("?"),
                };
                lines.push((field, line));
            }
        }
        seen.push(e.key);
    }

    let base = cfg.validate().map_err(|e| match e.field().and_then(|f| lines.iter().find(|l| l.0 == f)) {
        Some(&(_, line)) => at(line, e),
        None => e,
    })?;

    let sweep = match (axis, values) {
        (None, None) => None,
        (Some((line, _)), None) => {
            return Err(at(line, ConfigError::OutOfRange { field: "sweep_values", message: "sweep_axis given without sweep_values".into() }))
        }
        (None, Some((line, _))) => {
            return Err(at(line, ConfigError::OutOfRange { field: "sweep_axis", message: "sweep_values given without sweep_axis".into() }))
        }
        (Some((_, axis)), Some((line, values))) => {
            if values.is_empty() {
                return Err(at(line, ConfigError::OutOfRange { field: "sweep_values", message: "sweep_values is empty".into() }));
            }
            if values.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(at(
                    line,
                    ConfigError::OutOfRange { field: "sweep_values", message: "sweep_values must be strictly increasing".into() },
                ));
            }
            for &v in &values {
                base.with(|c| axis.set(c, v)).map_err(|e| at(line, e))?;
            }
            Some(Sweep { axis, values })
        }
    };
    // an implicit sweep mode is left for the caller to override
    if mode_given && mode == Mode::Sweep && sweep.is_none() {
        return Err(ConfigError::OutOfRange { field: "sweep_axis", message: "mode sweep needs sweep_axis and sweep_values".into() });
    }
    Ok(ExperimentSpec { base, mode, sweep, topology_count, output_path })
}
