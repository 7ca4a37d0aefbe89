//! Network and protocol parameters, their validation, and the flat
//! `key = value` configuration format.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::units::{db_to_linear, dbm_to_watts};

/// Errors raised while building or parsing a [`NetworkConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    /// A field is outside its legal range.
    #[error("{message}")]
    OutOfRange {
        field: &'static str,
        message: String,
    },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: malformed value `{value}` for `{key}`")]
    Malformed {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ConfigError>,
    },
}

impl ConfigError {
    fn range(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError::OutOfRange {
            field,
            message: message.into(),
        }
    }

    /// Name of the offending field for range errors.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            ConfigError::OutOfRange { field, .. } => Some(field),
            ConfigError::AtLine { source, .. } => source.field(),
            _ => None,
        }
    }

    /// Line number for errors that came out of a config file.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::UnknownKey { line, .. }
            | ConfigError::Malformed { line, .. }
            | ConfigError::Syntax { line }
            | ConfigError::Duplicate { line, .. }
            | ConfigError::AtLine { line, .. } => Some(*line),
            ConfigError::OutOfRange { .. } => None,
        }
    }
}

/// Physical, protocol and run parameters of one network.
///
/// All powers are in watts and lengths in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Transmitter density, per m².
    pub lambda: f64,
    /// Transmitter to receiver distance, m.
    pub r: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// SINR decoding threshold (linear).
    pub theta: f64,
    /// Transmit power, W.
    pub p_tx: f64,
    /// Thermal noise power, W.
    pub noise: f64,
    /// Per-slot packet arrival probability.
    pub xi: f64,
    /// ALOHA access probability.
    pub p: f64,
    /// Side of the square (toroidal) simulation window, m.
    pub window: f64,
    pub seed: u64,
    pub warmup_slots: u64,
    pub measure_slots: u64,
}

impl Default for NetworkConfig {
    /// α = 3.8, θ = 0 dB, P_tx = 17 dBm, σ² = −90 dBm, r = 0.5 m, on a
    /// 300 m torus with 1000 warm-up and 4000 measured slots.
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            r: 0.5,
            alpha: 3.8,
            theta: db_to_linear(0.0),
            p_tx: dbm_to_watts(17.0),
            noise: dbm_to_watts(-90.0),
            xi: 0.5,
            p: 1.0,
            window: 300.0,
            seed: 1,
            warmup_slots: 1000,
            measure_slots: 4000,
        }
    }
}

/// Keys accepted by [`NetworkConfig::apply`].
pub const NETWORK_KEYS: &[&str] = &[
    "lambda",
    "r",
    "alpha",
    "theta",
    "theta_db",
    "p_tx",
    "p_tx_dbm",
    "noise",
    "noise_dbm",
    "xi",
    "p",
    "window",
    "seed",
    "warmup_slots",
    "measure_slots",
];

impl NetworkConfig {
    /// Sets one field from its textual form. Returns `Ok(false)` when the key
    /// is not a network key, so callers can layer their own keys on top.
    pub fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<bool, ConfigError> {
        let malformed = || ConfigError::Malformed {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let real = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(malformed)
        };
        let int = || value.parse::<u64>().map_err(|_| malformed());
        match key {
            "lambda" => self.lambda = real()?,
            "r" => self.r = real()?,
            "alpha" => self.alpha = real()?,
            "theta" => self.theta = real()?,
            "theta_db" => self.theta = db_to_linear(real()?),
            "p_tx" => self.p_tx = real()?,
            "p_tx_dbm" => self.p_tx = dbm_to_watts(real()?),
            "noise" => self.noise = real()?,
            "noise_dbm" => self.noise = dbm_to_watts(real()?),
            "xi" => self.xi = real()?,
            "p" => self.p = real()?,
            "window" => self.window = real()?,
            "seed" => self.seed = int()?,
            "warmup_slots" => self.warmup_slots = int()?,
            "measure_slots" => self.measure_slots = int()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Parses a config consisting only of network keys, starting from the
    /// defaults.
    pub fn parse(text: &str) -> Result<ValidatedConfig, ConfigError> {
        let mut cfg = NetworkConfig::default();
        let mut seen = Vec::new();
        for entry in parse_kv(text)? {
            if seen.contains(&entry.key) {
                return Err(ConfigError::Duplicate {
                    line: entry.line,
                    key: entry.key,
                });
            }
            if !cfg.apply(&entry.key, &entry.value, entry.line)? {
                return Err(ConfigError::UnknownKey {
                    line: entry.line,
                    key: entry.key,
                });
            }
            seen.push(entry.key);
        }
        cfg.validate()
    }

    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        ValidatedConfig::new(self)
    }
}

/// A configuration that passed range checks, with derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    cfg: NetworkConfig,
    rho: f64,
    delta: f64,
}

impl ValidatedConfig {
    pub fn new(cfg: NetworkConfig) -> Result<Self, ConfigError> {
        let finite = |field: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::range(field, format!("{field} must be finite")))
            }
        };
        for (field, v) in [
            ("lambda", cfg.lambda),
            ("r", cfg.r),
            ("alpha", cfg.alpha),
            ("theta", cfg.theta),
            ("p_tx", cfg.p_tx),
            ("noise", cfg.noise),
            ("xi", cfg.xi),
            ("p", cfg.p),
            ("window", cfg.window),
        ] {
            finite(field, v)?;
        }
        if cfg.lambda < 0.0 {
            return Err(ConfigError::range("lambda", "lambda out of [0,inf)"));
        }
        if cfg.r <= 0.0 {
            return Err(ConfigError::range("r", "r out of (0,inf)"));
        }
        if cfg.alpha <= 2.0 {
            return Err(ConfigError::range("alpha", "alpha must exceed 2"));
        }
        if cfg.theta <= 0.0 {
            return Err(ConfigError::range("theta", "theta out of (0,inf)"));
        }
        if cfg.p_tx <= 0.0 {
            return Err(ConfigError::range("p_tx", "p_tx out of (0,inf)"));
        }
        if cfg.noise <= 0.0 {
            return Err(ConfigError::range("noise", "noise out of (0,inf)"));
        }
        if !(cfg.xi > 0.0 && cfg.xi <= 1.0) {
            return Err(ConfigError::range("xi", "xi out of (0,1]"));
        }
        if !(cfg.p > 0.0 && cfg.p <= 1.0) {
            return Err(ConfigError::range("p", "p out of (0,1]"));
        }
        if cfg.window <= 2.0 * cfg.r {
            return Err(ConfigError::range(
                "window",
                format!("window out of ({},inf): must exceed 2r", 2.0 * cfg.r),
            ));
        }
        let rho = cfg.p_tx / cfg.noise;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(ConfigError::range("noise", "p_tx/noise must be finite"));
        }
        Ok(Self {
            delta: 2.0 / cfg.alpha,
            rho,
            cfg,
        })
    }

    pub fn cfg(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn into_inner(self) -> NetworkConfig {
        self.cfg
    }

    /// Transmit SNR scale `P_tx / σ²`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `2 / α`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `θ r^α / ρ`, minus the log of the interference-free success probability.
    pub fn noise_exponent(&self) -> f64 {
        self.cfg.theta * self.cfg.r.powf(self.cfg.alpha) / self.rho
    }

    /// Success probability of a link that sees no interference, `exp(−θr^α/ρ)`.
    pub fn isolated_success(&self) -> f64 {
        (-self.noise_exponent()).exp()
    }

    /// `λπr²θ^δ`, the weight of the interference term in the log-MGF.
    pub fn interference_scale(&self) -> f64 {
        self.cfg.lambda * PI * self.cfg.r * self.cfg.r * self.cfg.theta.powf(self.delta)
    }

    /// Steady-state probability that a node with success probability `t`
    /// transmits in a slot: `pξ / (ξ + (1−ξ)pt)`.
    pub fn activity(&self, t: f64) -> f64 {
        let (xi, p) = (self.cfg.xi, self.cfg.p);
        p * xi / (xi + (1.0 - xi) * p * t)
    }

    /// Returns a copy with one parameter replaced and re-validated.
    pub fn with(&self, edit: impl FnOnce(&mut NetworkConfig)) -> Result<Self, ConfigError> {
        let mut cfg = self.cfg.clone();
        edit(&mut cfg);
        cfg.validate()
    }
}

impl fmt::Display for NetworkConfig {
    /// One `key = value` line per field, in the config file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda = {}", self.lambda)?;
        writeln!(f, "r = {}", self.r)?;
        writeln!(f, "alpha = {}", self.alpha)?;
        writeln!(f, "theta = {}", self.theta)?;
        writeln!(f, "p_tx = {}", self.p_tx)?;
        writeln!(f, "noise = {}", self.noise)?;
        writeln!(f, "xi = {}", self.xi)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "window = {}", self.window)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "warmup_slots = {}", self.warmup_slots)?;
        write!(f, "measure_slots = {}", self.measure_slots)
    }
}

/// One `key = value` entry of a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvEntry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits config text into entries. `#` starts a comment; blank lines are
/// skipped. Line numbers are 1-based.
pub fn parse_kv(text: &str) -> Result<Vec<KvEntry>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        out.push(KvEntry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}
