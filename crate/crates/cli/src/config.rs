//! Run configuration: a flat `key = value` format with `[section]`
//! headers, strict about unknown keys.
//!
//! Frequencies in SI configs are ordinary frequencies in Hz and are
//! converted to angular rates internally; durations are in seconds.
//! With `units = scaled` the rates are instead angular rates in units
//! of the cavity decay rate and times are in units of its inverse,
//! which is convenient for small verification instances.

use phasespace_core::params::PhysicalParams;
use phasespace_core::pulse::PulseEnvelope;
use phasespace_core::sde::{IntegratorConfig, Representation, Scheme};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;
use std::fmt::Write as _;

/// The preset used by production runs: a silicon optomechanical
/// crystal driven on the red sideband.
pub const PAPER_CFG: &str = include_str!("../presets/paper.cfg");
/// Small nonlinear instance that fits a truncated Fock basis, for
/// cross-checks against the master-equation oracle.
pub const ORACLE_CFG: &str = include_str!("../presets/oracle-small.cfg");

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown key `{key}` in section [{section}] at line {line}")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Si,
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprSelect {
    Pp,
    Wigner,
    Both,
}

impl ReprSelect {
    pub fn label(&self) -> &'static str {
        match self {
            ReprSelect::Pp => "pp",
            ReprSelect::Wigner => "wigner",
            ReprSelect::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<ReprSelect> {
        match s {
            "pp" => Some(ReprSelect::Pp),
            "wigner" => Some(ReprSelect::Wigner),
            "both" => Some(ReprSelect::Both),
            _ => None,
        }
    }

    pub fn representations(&self) -> Vec<Representation> {
        match self {
            ReprSelect::Pp => vec![Representation::PositiveP],
            ReprSelect::Wigner => vec![Representation::Wigner],
            ReprSelect::Both => vec![Representation::PositiveP, Representation::Wigner],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Square,
    /// Truncated Gaussian; `center` and `width` in the config's time
    /// unit.
    Gaussian { center: f64, width: f64 },
}

/// Master-equation comparison settings, present only when the config
/// is meant for `oracle-compare`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSection {
    pub dim_a: usize,
    pub dim_b: usize,
    pub dt: f64,
}

/// Parsed and validated run configuration. Numeric fields keep the
/// units they were written in (`units` records which), so serializing
/// and re-parsing is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: Units,
    /// Rates as written: Hz for SI configs, angular scaled rates
    /// otherwise.
    pub omega_m: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub chi0: f64,
    pub delta: f64,
    pub n_b0: f64,
    pub n_th_a: f64,
    pub n_th_b: f64,
    pub shape: PulseShape,
    pub n_ph: f64,
    /// Pulse duration as written: seconds for SI, units of the inverse
    /// cavity decay rate otherwise.
    pub tau: f64,
    pub n_traj: u64,
    pub n_batches: u64,
    pub seed: u64,
    pub representation: ReprSelect,
    /// Integrator step in scaled time.
    pub dt: f64,
    pub n_checkpoints: usize,
    pub scheme: Scheme,
    pub oracle: Option<OracleSection>,
}

impl RunConfig {
    /// Model parameters in the units the config was written in
    /// (angular rates; SI configs convert Hz by 2 pi here).
    pub fn physical_params(&self) -> PhysicalParams {
        let f = match self.units {
            Units::Si => TAU,
            Units::Scaled => 1.0,
        };
        PhysicalParams {
            omega_m: self.omega_m * f,
            gamma_a: self.gamma_a * f,
            gamma_b: self.gamma_b * f,
            chi0: self.chi0 * f,
            delta: self.delta * f,
            n_b0: self.n_b0,
            n_th_a: self.n_th_a,
            n_th_b: self.n_th_b,
            n_ph: self.n_ph,
            tau: self.tau,
        }
    }

    /// Scaled parameters and envelope, ready for the integrator.
    pub fn working(&self) -> Result<(PhysicalParams, PulseEnvelope), ConfigError> {
        let phys = self.physical_params();
        let env = match self.shape {
            PulseShape::Square => PulseEnvelope::square(phys.tau),
            PulseShape::Gaussian { center, width } => {
                PulseEnvelope::gaussian(phys.tau, center, width)
            }
        }
        .map_err(|e| ConfigError::Validation(e.to_string()))?;
        Ok((phys.scaled().params, env.scaled(phys.gamma_a)))
    }

    pub fn integrator(&self, tau_scaled: f64) -> IntegratorConfig {
        IntegratorConfig::for_pulse(tau_scaled, self.dt, self.n_checkpoints, self.scheme)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.physical_params().validate().map_err(|e| ConfigError::Validation(e.to_string()))?;
        if self.n_traj == 0 {
            return Err(ConfigError::Validation("n_traj must be positive".into()));
        }
        if self.n_batches < 10 {
            return Err(ConfigError::Validation(
                "standard-error estimation needs at least 10 batches".into(),
            ));
        }
        if self.n_traj % self.n_batches != 0 {
            return Err(ConfigError::Validation(
                "n_traj must be divisible by n_batches".into(),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(ConfigError::Validation("dt must be strictly positive".into()));
        }
        if self.n_checkpoints == 0 {
            return Err(ConfigError::Validation("n_checkpoints must be at least 1".into()));
        }
        if let PulseShape::Gaussian { width, .. } = self.shape {
            if !(width > 0.0) {
                return Err(ConfigError::Validation("pulse width must be positive".into()));
            }
        }
        if let Some(o) = &self.oracle {
            if o.dim_a < 2 || o.dim_b < 2 {
                return Err(ConfigError::Validation("oracle dims must be >= 2".into()));
            }
            if !(o.dt > 0.0) {
                return Err(ConfigError::Validation("oracle dt must be positive".into()));
            }
        }
        Ok(())
    }

    /// Canonical serialization: fixed key order, shortest-round-trip
    /// floats, no comments. `parse(to_text(c)) == c` exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (u, hz, sec) = match self.units {
            Units::Si => ("si", "_hz", "_s"),
            Units::Scaled => ("scaled", "", ""),
        };
        writeln!(s, "[system]").unwrap();
        writeln!(s, "units = {u}").unwrap();
        writeln!(s, "omega_m{hz} = {:?}", self.omega_m).unwrap();
        writeln!(s, "gamma_a{hz} = {:?}", self.gamma_a).unwrap();
        writeln!(s, "gamma_b{hz} = {:?}", self.gamma_b).unwrap();
        writeln!(s, "chi0{hz} = {:?}", self.chi0).unwrap();
        writeln!(s, "delta{hz} = {:?}", self.delta).unwrap();
        writeln!(s, "n_b0 = {:?}", self.n_b0).unwrap();
        writeln!(s, "n_th_a = {:?}", self.n_th_a).unwrap();
        writeln!(s, "n_th_b = {:?}", self.n_th_b).unwrap();
        writeln!(s, "\n[pulse]").unwrap();
        match self.shape {
            PulseShape::Square => writeln!(s, "shape = square").unwrap(),
            PulseShape::Gaussian { center, width } => {
                writeln!(s, "shape = gaussian").unwrap();
                writeln!(s, "center{sec} = {center:?}").unwrap();
                writeln!(s, "width{sec} = {width:?}").unwrap();
            }
        }
        writeln!(s, "n_ph = {:?}", self.n_ph).unwrap();
        writeln!(s, "tau{sec} = {:?}", self.tau).unwrap();
        writeln!(s, "\n[run]").unwrap();
        writeln!(s, "n_traj = {}", self.n_traj).unwrap();
        writeln!(s, "n_batches = {}", self.n_batches).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "representation = {}", self.representation.label()).unwrap();
        writeln!(s, "dt = {:?}", self.dt).unwrap();
        writeln!(s, "n_checkpoints = {}", self.n_checkpoints).unwrap();
        let scheme = match self.scheme {
            Scheme::RotatingEuler => "rotating",
            Scheme::EulerMaruyama => "euler",
        };
        writeln!(s, "scheme = {scheme}").unwrap();
        if let Some(o) = &self.oracle {
            writeln!(s, "\n[oracle]").unwrap();
            writeln!(s, "dim_a = {}", o.dim_a).unwrap();
            writeln!(s, "dim_b = {}", o.dim_b).unwrap();
            writeln!(s, "dt = {:?}", o.dt).unwrap();
        }
        s
    }

    /// SHA-256 of the canonical serialization: stable under comment or
    /// whitespace edits, changed by any semantic field.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        let mut s = String::with_capacity(64);
        for b in digest {
            write!(s, "{b:02x}").unwrap();
        }
        s
    }
}

struct Entry<'a> {
    section: &'a str,
    key: &'a str,
    value: &'a str,
    line: usize,
    value_col: usize,
}

fn lex(text: &str) -> Result<Vec<Entry<'_>>, ConfigError> {
    let mut entries = Vec::new();
    let mut section = "";
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Parse {
                    line,
                    column: body.len(),
                    message: "unterminated section header".into(),
                });
            };
            section = name.trim();
            if section.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    column: 2,
                    message: "empty section name".into(),
                });
            }
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(ConfigError::Parse {
                line,
                column: 1,
                message: format!("expected `key = value`, got `{trimmed}`"),
            });
        };
        let key = body[..eq].trim();
        let value = body[eq + 1..].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse { line, column: 1, message: "missing key".into() });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column: eq + 2,
                message: format!("missing value for `{key}`"),
            });
        }
        if section.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column: 1,
                message: format!("key `{key}` appears before any [section] header"),
            });
        }
        let value_col = body[eq + 1..].find(|c: char| !c.is_whitespace()).unwrap_or(0) + eq + 2;
        entries.push(Entry { section, key, value, line, value_col });
    }
    Ok(entries)
}

fn parse_f64(e: &Entry) -> Result<f64, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::Parse {
        line: e.line,
        column: e.value_col,
        message: format!("`{}` is not a number", e.value),
    })
}

fn parse_u64(e: &Entry) -> Result<u64, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::Parse {
        line: e.line,
        column: e.value_col,
        message: format!("`{}` is not a nonnegative integer", e.value),
    })
}

fn parse_usize(e: &Entry) -> Result<usize, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::Parse {
        line: e.line,
        column: e.value_col,
        message: format!("`{}` is not a nonnegative integer", e.value),
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries = lex(text)?;

    let mut units = Units::Si;
    for e in &entries {
        if e.section == "system" && e.key == "units" {
            units = match e.value {
                "si" => Units::Si,
                "scaled" => Units::Scaled,
                other => {
                    return Err(ConfigError::Parse {
                        line: e.line,
                        column: e.value_col,
                        message: format!("units must be `si` or `scaled`, got `{other}`"),
                    })
                }
            };
        }
    }
    let (hz, sec) = match units {
        Units::Si => ("_hz", "_s"),
        Units::Scaled => ("", ""),
    };
    let rate_key = |base: &str| format!("{base}{hz}");
    let time_key = |base: &str| format!("{base}{sec}");

    let mut omega_m = None;
    let mut gamma_a = None;
    let mut gamma_b = None;
    let mut chi0 = None;
    let mut delta = None;
    let mut n_b0 = None;
    let mut n_th_a = None;
    let mut n_th_b = None;
    let mut shape = None;
    let mut center = None;
    let mut width = None;
    let mut n_ph = None;
    let mut tau = None;
    let mut n_traj = None;
    let mut n_batches = None;
    let mut seed = None;
    let mut representation = None;
    let mut dt = None;
    let mut n_checkpoints = None;
    let mut scheme = None;
    let mut dim_a = None;
    let mut dim_b = None;
    let mut oracle_dt = None;
    let mut saw_oracle = false;

    for e in &entries {
        let k = e.key;
        match e.section {
            "system" => {
                if k == "units" {
                    continue;
                } else if k == rate_key("omega_m") {
                    omega_m = Some(parse_f64(e)?);
                } else if k == rate_key("gamma_a") {
                    gamma_a = Some(parse_f64(e)?);
                } else if k == rate_key("gamma_b") {
                    gamma_b = Some(parse_f64(e)?);
                } else if k == rate_key("chi0") {
                    chi0 = Some(parse_f64(e)?);
                } else if k == rate_key("delta") {
                    delta = Some(parse_f64(e)?);
                } else if k == "n_b0" {
                    n_b0 = Some(parse_f64(e)?);
                } else if k == "n_th_a" {
                    n_th_a = Some(parse_f64(e)?);
                } else if k == "n_th_b" {
                    n_th_b = Some(parse_f64(e)?);
                } else {
                    return Err(unknown(e));
                }
            }
            "pulse" => {
                if k == "shape" {
                    shape = Some(match e.value {
                        "square" => PulseShape::Square,
                        "gaussian" => PulseShape::Gaussian { center: 0.0, width: 0.0 },
                        other => {
                            return Err(ConfigError::Parse {
                                line: e.line,
                                column: e.value_col,
                                message: format!(
                                    "shape must be `square` or `gaussian`, got `{other}`"
                                ),
                            })
                        }
                    });
                } else if k == time_key("center") {
                    center = Some(parse_f64(e)?);
                } else if k == time_key("width") {
                    width = Some(parse_f64(e)?);
                } else if k == "n_ph" {
                    n_ph = Some(parse_f64(e)?);
                } else if k == time_key("tau") {
                    tau = Some(parse_f64(e)?);
                } else {
                    return Err(unknown(e));
                }
            }
            "run" => match k {
                "n_traj" => n_traj = Some(parse_u64(e)?),
                "n_batches" => n_batches = Some(parse_u64(e)?),
                "seed" => seed = Some(parse_u64(e)?),
                "representation" => {
                    representation = Some(ReprSelect::parse(e.value).ok_or_else(|| {
                        ConfigError::Parse {
                            line: e.line,
                            column: e.value_col,
                            message: format!(
                                "representation must be pp, wigner or both, got `{}`",
                                e.value
                            ),
                        }
                    })?)
                }
                "dt" => dt = Some(parse_f64(e)?),
                "n_checkpoints" => n_checkpoints = Some(parse_usize(e)?),
                "scheme" => {
                    scheme = Some(match e.value {
                        "rotating" => Scheme::RotatingEuler,
                        "euler" => Scheme::EulerMaruyama,
                        other => {
                            return Err(ConfigError::Parse {
                                line: e.line,
                                column: e.value_col,
                                message: format!(
                                    "scheme must be `rotating` or `euler`, got `{other}`"
                                ),
                            })
                        }
                    })
                }
                _ => return Err(unknown(e)),
            },
            "oracle" => {
                saw_oracle = true;
                match k {
                    "dim_a" => dim_a = Some(parse_usize(e)?),
                    "dim_b" => dim_b = Some(parse_usize(e)?),
                    "dt" => oracle_dt = Some(parse_f64(e)?),
                    _ => return Err(unknown(e)),
                }
            }
            other => {
                return Err(ConfigError::Parse {
                    line: e.line,
                    column: 1,
                    message: format!("unknown section [{other}]"),
                })
            }
        }
    }

    let req = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| ConfigError::Validation(format!("missing required key `{name}`")))
    };
    let shape = match shape
        .ok_or_else(|| ConfigError::Validation("missing required key `shape`".into()))?
    {
        PulseShape::Square => {
            if center.is_some() || width.is_some() {
                return Err(ConfigError::Validation(
                    "center/width only apply to gaussian pulses".into(),
                ));
            }
            PulseShape::Square
        }
        PulseShape::Gaussian { .. } => PulseShape::Gaussian {
            center: req(&time_key("center"), center)?,
            width: req(&time_key("width"), width)?,
        },
    };
    let oracle = if saw_oracle {
        Some(OracleSection {
            dim_a: dim_a
                .ok_or_else(|| ConfigError::Validation("missing required key `dim_a`".into()))?,
            dim_b: dim_b
                .ok_or_else(|| ConfigError::Validation("missing required key `dim_b`".into()))?,
            dt: req("oracle dt", oracle_dt)?,
        })
    } else {
        None
    };

    let cfg = RunConfig {
        units,
        omega_m: req(&rate_key("omega_m"), omega_m)?,
        gamma_a: req(&rate_key("gamma_a"), gamma_a)?,
        gamma_b: req(&rate_key("gamma_b"), gamma_b)?,
        chi0: req(&rate_key("chi0"), chi0)?,
        delta: req(&rate_key("delta"), delta)?,
        n_b0: req("n_b0", n_b0)?,
        n_th_a: req("n_th_a", n_th_a)?,
        n_th_b: req("n_th_b", n_th_b)?,
        shape,
        n_ph: req("n_ph", n_ph)?,
        tau: req(&time_key("tau"), tau)?,
        n_traj: n_traj.unwrap_or(crate::ensemble::DEFAULT_N_TRAJ),
        n_batches: n_batches.unwrap_or(20),
        seed: seed.unwrap_or(1),
        representation: representation.unwrap_or(ReprSelect::Both),
        dt: dt.unwrap_or(0.01),
        n_checkpoints: n_checkpoints.unwrap_or(12),
        scheme: scheme.unwrap_or(Scheme::RotatingEuler),
        oracle,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn unknown(e: &Entry) -> ConfigError {
    ConfigError::UnknownKey {
        line: e.line,
        section: e.section.to_string(),
        key: e.key.to_string(),
    }
}
