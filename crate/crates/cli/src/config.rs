//! Flat `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment, keys are case sensitive and may
//! appear once. Every key a subcommand reads is declared up front so unknown
//! keys are rejected instead of silently ignored.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use effdim::format::signal_from_text;
use effdim::signals::{
    adversarial_pair, head_heavy_signal, power_law_signal, self_similar_signal, NoiseLevel, Signal,
    SmoothnessClassParams,
};
use effdim::PriorParams64;

pub type ConfigResult<T> = Result<T, String>;

#[derive(Debug, Clone)]
pub struct Config {
    entries: Vec<(String, String)>,
    /// Directory against which relative file paths are resolved.
    base: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: PathBuf) -> ConfigResult<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value', got '{}'", k + 1, raw.trim()))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(format!("line {}: empty key", k + 1));
            }
            if entries.iter().any(|(k2, _)| k2 == key) {
                return Err(format!("line {}: duplicate key '{key}'", k + 1));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { entries, base })
    }

    pub fn set(&mut self, key: &str, value: String) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    /// Entries in file order, for echoing into report headers.
    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn reject_unknown(&self, allowed: &[&str]) -> ConfigResult<()> {
        match self.entries.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(format!("unknown key '{k}' for this subcommand")),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> ConfigResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("key '{key}': cannot parse '{v}': {e}")))
            .transpose()
    }

    pub fn req<T: FromStr>(&self, key: &str) -> ConfigResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(key)?.ok_or_else(|| format!("missing required key '{key}'"))
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> ConfigResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> ConfigResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| format!("key '{key}': cannot parse '{s}': {e}")))
                    .collect()
            })
            .transpose()
    }

    pub fn path(&self, key: &str) -> ConfigResult<Option<PathBuf>> {
        Ok(self.raw(key).map(|v| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        }))
    }

    pub fn noise(&self) -> ConfigResult<NoiseLevel<f64>> {
        NoiseLevel::new(self.or("epsilon", 1.0)?).map_err(|e| e.to_string())
    }

    pub fn prior(&self, eps: NoiseLevel<f64>) -> ConfigResult<PriorParams64> {
        PriorParams64::new(self.req("kappa")?, self.req("varkappa")?, eps).map_err(|e| e.to_string())
    }

    pub fn class(&self) -> ConfigResult<SmoothnessClassParams<f64>> {
        SmoothnessClassParams::new(
            self.req("s")?,
            self.or("Q", 1.0)?,
            self.or("alpha", 0.1)?,
            self.or("rho0", 2.0)?,
            self.or("N0", 2)?,
        )
        .map_err(|e| e.to_string())
    }

    /// The signal described by `signal = <kind>` and its parameters.
    pub fn signal(&self) -> ConfigResult<Signal<f64>> {
        let kind: String = self.req("signal")?;
        let err = |e: effdim::Error| e.to_string();
        match kind.as_str() {
            "zero" => Signal::zeros(self.or("N", 1)?).map_err(err),
            "power-law" => power_law_signal(self.req("s")?, self.or("c", 1.0)?, self.req("N")?).map_err(err),
            "adversarial-prime" | "adversarial-double-prime" => {
                let (low, high) = adversarial_pair(
                    self.req("tau")?,
                    self.noise()?,
                    self.req("L1")?,
                    self.req("L2")?,
                    self.req("Delta")?,
                )
                .map_err(err)?;
                Ok(if kind == "adversarial-prime" { low } else { high })
            }
            "head-heavy" => head_heavy_signal(self.noise()?, self.req("level")?, self.req("N")?).map_err(err),
            "self-similar" => self_similar_signal(&self.class()?, self.req("N")?).map_err(err),
            "file" => {
                let path = self.path("signal_file")?.ok_or("missing required key 'signal_file'")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read signal file {}: {e}", path.display()))?;
                signal_from_text(&text).map_err(|e| format!("signal file {}: {e}", path.display()))
            }
            "values" => {
                let coeffs = self.list("values")?.ok_or("missing required key 'values'")?;
                Signal::new(coeffs, self.or("tail_energy", 0.0)?).map_err(err)
            }
            other => Err(format!(
                "unknown signal kind '{other}' (expected zero, power-law, adversarial-prime, \
                 adversarial-double-prime, head-heavy, self-similar, file or values)"
            )),
        }
    }
}

/// Keys read by [`Config::signal`].
pub const SIGNAL_KEYS: &[&str] = &[
    "signal", "N", "s", "c", "L1", "L2", "Delta", "level", "Q", "alpha", "rho0", "N0", "signal_file",
    "values", "tail_energy",
];
