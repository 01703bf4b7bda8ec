//! Flat `key = value` configuration files.
//!
//! `#` starts a comment anywhere on a line. Keys are unique and must come
//! from [`KNOWN_KEYS`]; physical quantities carry their unit in the key.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "out",
    "seed",
    "p_star",
    "theta_min_deg",
    "theta_max_deg",
    "theta_steps",
    "m_steps",
    "mean_photons_max",
    "chi_list_deg",
    "trials",
    "source",
    "drift",
    "mean_photons_1",
    "mean_photons_2",
    "eta",
    "dark_mean",
    "window_fs",
    "dead_ns",
    "lambda1_nm",
    "lambda2_nm",
    "chi0_deg",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    origin: String,
    /// key → (line number, raw value)
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Config(format!("{origin}:{line_no}: {msg}"));
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(format!("missing value for `{key}`")));
            }
            if let Some((first, _)) = entries.insert(key.to_string(), (line_no, value.to_string())) {
                return Err(err(format!("duplicate key `{key}` (first set on line {first})")));
            }
        }
        Ok(Self { origin: origin.to_string(), entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Parsed value of `key`, with the line number in any error.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{}:{line}: invalid value `{v}` for `{key}`", self.origin))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => parse_list(v)
                .map(Some)
                .map_err(|e| CliError::Config(format!("{}:{line}: {e} in `{key}`", self.origin))),
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("invalid number `{}`", x.trim())))
        .collect()
}
