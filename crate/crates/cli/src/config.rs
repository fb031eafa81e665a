//! `key = value` configuration files merged with command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Keys read outside the per-experiment parameter set.
const RESERVED: [&str; 2] = ["experiment", "out"];

/// Parameter values from a config file, resolved one key at a time against
/// flags. Every resolved value is recorded for the manifest.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, Value>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected key = value, got '{raw}'",
                    no + 1
                ))
            })?;
            let key = key.trim().replace('_', "-");
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key '{key}'",
                    no + 1
                )));
            }
        }
        Ok(Self {
            values,
            ..Self::default()
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// A raw config entry outside the parameter set (`experiment`, `out`).
    pub fn reserved(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                CliError::Usage(format!("config key '{key}': cannot parse '{raw}': {e}"))
            }),
        }
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.resolved.insert(key.to_string(), v);
    }

    /// Flag if given, else config entry, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// Like [`Settings::get`] but without a default.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let v = self.lookup(key, flag)?;
        self.record(key, &v);
        Ok(v)
    }

    /// Resolved parameters, or a usage error naming unknown config keys.
    pub fn finish(self) -> Result<BTreeMap<String, Value>, CliError> {
        let unknown: Vec<&String> = self
            .values
            .keys()
            .filter(|k| !self.used.contains(*k) && !RESERVED.contains(&k.as_str()))
            .collect();
        if !unknown.is_empty() {
            let names: Vec<&str> = unknown.iter().map(|s| s.as_str()).collect();
            return Err(CliError::Usage(format!(
                "unknown config keys: {}",
                names.join(", ")
            )));
        }
        Ok(self.resolved)
    }
}

/// Fails with a validation message unless `ok`.
pub fn require(ok: bool, what: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(what()))
    }
}
