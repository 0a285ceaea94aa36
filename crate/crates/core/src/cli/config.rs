//! Flat `key = value` run configuration.

use std::collections::HashSet;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::reliability::{linspace, Reading, Regime};

/// Inclusive sweep axis `[lo, hi]` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    fn parse(key: &str, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("`{key}` must be `lo, hi, n`, got `{text}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        let r = Range { lo, hi, n };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
            return Err(Error::Config(format!(
                "`{key}` needs lo < hi and n >= 2, got {lo}, {hi}, {n}"
            )));
        }
        Ok(r)
    }
}

/// Family examined by `check-consistency`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    /// The discretized measurement.
    Pipeline,
    /// `{I, 0}` on a qubit.
    Identity,
    /// A two-time qubit family with interference between its histories.
    Interfering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub k0_range: Option<Range>,
    pub b_range: Option<Range>,
    pub bx_range: Option<Range>,
    pub reading: Reading,
    pub regime: Regime,
    pub out: Option<PathBuf>,
    /// Second field for the slope comparison of `fit-relation`.
    pub bx_compare: Option<f64>,
    /// Sweep CSV to fit instead of running a sweep.
    pub input: Option<PathBuf>,
    pub family: FamilyChoice,
    pub dim: usize,
    pub oracle_dz: f64,
    pub oracle_dt: f64,
    pub sg_dz: f64,
    pub sg_dt: f64,
    /// Keys assigned by the user rather than by defaults.
    explicit: HashSet<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            k0_range: None,
            b_range: None,
            bx_range: None,
            reading: Reading::default(),
            regime: Regime::FirstOrder,
            out: None,
            bx_compare: None,
            input: None,
            family: FamilyChoice::Pipeline,
            dim: 2048,
            oracle_dz: 0.02,
            oracle_dt: 0.004,
            sg_dz: 0.01,
            sg_dt: 0.002,
            explicit: HashSet::new(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "hbar",
    "m",
    "a",
    "sigma",
    "f",
    "x0",
    "b",
    "k0",
    "Bx",
    "k0_range",
    "b_range",
    "Bx_range",
    "reading",
    "regime",
    "out",
    "Bx_compare",
    "input",
    "family",
    "dim",
    "oracle_dz",
    "oracle_dt",
    "sg_dz",
    "sg_dt",
];

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{v}`")))
}

impl RunConfig {
    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    /// Assigns one key. `user` marks the value as not coming from a default.
    pub fn set(&mut self, key: &str, value: &str, user: bool) -> Result<()> {
        let v = value.trim();
        let p = &mut self.params;
        match key {
            "hbar" => p.hbar = number(key, v)?,
            "m" => p.m = number(key, v)?,
            "a" => p.a = number(key, v)?,
            "sigma" => p.sigma = number(key, v)?,
            "f" => p.f = number(key, v)?,
            "x0" => p.x0 = number(key, v)?,
            "b" => p.b = number(key, v)?,
            "k0" => p.k0 = number(key, v)?,
            "Bx" => p.bx = number(key, v)?,
            "k0_range" => self.k0_range = Some(Range::parse(key, v)?),
            "b_range" => self.b_range = Some(Range::parse(key, v)?),
            "Bx_range" => self.bx_range = Some(Range::parse(key, v)?),
            "reading" => self.reading = v.parse()?,
            "regime" => self.regime = v.parse()?,
            "out" => self.out = Some(PathBuf::from(v)),
            "Bx_compare" => self.bx_compare = Some(number(key, v)?),
            "input" => self.input = Some(PathBuf::from(v)),
            "family" => {
                self.family = match v {
                    "pipeline" => FamilyChoice::Pipeline,
                    "identity" => FamilyChoice::Identity,
                    "interfering" => FamilyChoice::Interfering,
                    _ => {
                        return Err(Error::Config(format!(
                            "`family` must be pipeline, identity or interfering, got `{v}`"
                        )))
                    }
                }
            }
            "dim" => {
                self.dim = v
                    .parse()
                    .map_err(|_| Error::Config(format!("`dim` expects an integer, got `{v}`")))?
            }
            "oracle_dz" => self.oracle_dz = number(key, v)?,
            "oracle_dt" => self.oracle_dt = number(key, v)?,
            "sg_dz" => self.sg_dz = number(key, v)?,
            "sg_dt" => self.sg_dt = number(key, v)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}` (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        if user {
            self.explicit.insert(key.to_string());
        }
        Ok(())
    }

    /// Applies a config file body: one `key = value` per line, `#` starts a
    /// comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    i + 1
                ))
            })?;
            self.set(k.trim(), v, true)?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{kv}`")))?;
        self.set(k.trim(), v, true)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (name, v) in [
            ("oracle_dz", self.oracle_dz),
            ("oracle_dt", self.oracle_dt),
            ("sg_dz", self.sg_dz),
            ("sg_dt", self.sg_dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be > 0, got {v}")));
            }
        }
        if let Some(bx) = self.bx_compare {
            if !(bx.is_finite() && bx > 0.0) {
                return Err(Error::Config(format!("`Bx_compare` must be > 0, got {bx}")));
            }
        }
        if let Some(r) = self.bx_range {
            if r.lo < 0.0 {
                return Err(Error::Config(format!(
                    "`Bx_range` must be >= 0, got lo = {}",
                    r.lo
                )));
            }
        }
        Ok(())
    }
}
