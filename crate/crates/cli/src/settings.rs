//! Flat `key = value` configuration merged under command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Every key accepted in a config file or as a `--flag`.
pub const KEYS: &[&str] = &[
    "set", "k", "horizon", "seed", "budget-nodes", "tmax", "tol", "N", "H", "threads", "out", "cert", "system", "alpha",
    "observable", "observables", "a", "beta", "s", "size", "radius", "resolution", "values", "u", "v", "arcs", "delta",
    "count",
];

/// Keys that change where or how fast a run happens, not what it computes.
const NON_SEMANTIC: &[&str] = &["out", "threads"];

#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    let k = key.trim().replace('_', "-");
    if k.eq_ignore_ascii_case("n") || k.eq_ignore_ascii_case("h") {
        k.to_ascii_uppercase()
    } else {
        k
    }
}

impl Settings {
    /// Parses config text: one `key = value` per line, `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key {key:?}", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse_config(&text)
    }

    /// Flag values win over whatever the config file said.
    pub fn overlay(&mut self, flags: impl IntoIterator<Item = (&'static str, Option<String>)>) {
        for (k, v) in flags {
            if let Some(v) = v {
                self.values.insert(k.to_string(), v);
            }
        }
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.str(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("bad value {v:?} for {key}"))))
            .transpose()
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Config(format!("--{key} is required")))
    }

    /// Real numbers, with `golden` and `sqrt2` accepted as names.
    pub fn real(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => parse_real(v).ok_or_else(|| CliError::Config(format!("bad value {v:?} for {key}"))),
        }
    }

    /// Semantic inputs, echoed into reports.
    pub fn inputs(&self) -> BTreeMap<String, String> {
        self.values.iter().filter(|(k, _)| !NON_SEMANTIC.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

pub fn parse_real(v: &str) -> Option<f64> {
    match v.trim() {
        "golden" => Some(finsum::numeric::GOLDEN),
        "sqrt2" => Some(std::f64::consts::SQRT_2 - 1.0),
        t => t.parse().ok(),
    }
}
