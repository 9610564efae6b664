//! Flat `key=value` config files and the option-resolution chain.
//!
//! Precedence, lowest to highest: built-in defaults, config file, `OCRISK_*`
//! environment variables (handled by clap), command-line flags.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct KvConfig {
    values: HashMap<String, String>,
}

impl KvConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value, got `{line}`", path.display(), i + 1);
            };
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Ok(Some(v)),
                Err(_) => bail!("config key `{key}`: unreadable value `{raw}`"),
            },
        }
    }
}

/// flag (or env) beats config, config beats the default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// As [`pick`] but with no default; errors with the flag name.
pub fn pick_required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    flag.or(config)
        .with_context(|| format!("missing required --{name} (not in flags or config)"))
}

/// Parse a comma-separated list.
pub fn parse_list<T: FromStr>(raw: &str, name: &str) -> Result<Vec<T>> {
    let items: std::result::Result<Vec<T>, _> =
        raw.split(',').map(|t| t.trim().parse::<T>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => bail!("--{name}: unreadable list `{raw}`"),
    }
}
