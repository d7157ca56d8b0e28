//! Shared `key = value` settings file.
//!
//! ```text
//! # shiftsearch.conf
//! index_dir = ./index
//! port = 8080
//! feedback_log = ./feedback.jsonl
//! method = semantic
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key can be overridden by
//! an environment variable named `SHIFTSEARCH_` plus the upper-cased key,
//! e.g. `SHIFTSEARCH_PORT`. Command-line flags take precedence over both.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const ENV_PREFIX: &str = "SHIFTSEARCH_";

/// Recognized keys with a short description each.
pub const KEYS: &[(&str, &str)] = &[
    ("index_dir", "index directory used by search, serve and index inspect"),
    ("host", "listen address of the HTTP service"),
    ("port", "listen port of the HTTP service (1-65535)"),
    ("feedback_log", "append-only JSON-lines feedback log"),
    ("plan", "assessment plan JSON file"),
    ("static_dir", "directory with the web UI bundle"),
    ("method", "default search method: semantic, bm25 or keyword"),
    ("page_size", "results per page"),
    ("k", "candidates kept for term-level ranking"),
    ("expansion", "context expansion of queries: on or off"),
    ("dim", "vector dimension of the hashed embedding provider"),
    ("seed", "seed of the hashed embedding provider"),
    ("cutoffs", "comma-separated metric cutoffs"),
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid value {value:?} for {key}: {message}")]
    Value {
        key: String,
        value: String,
        message: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected key = value".into()))?;
            let key = key.trim();
            if !known(key) {
                return Err(syntax(format!("unknown key {key:?}")));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Overrides values from `lookup("SHIFTSEARCH_<KEY>")` for every known
    /// key.
    pub fn apply_env_with(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        for (key, _) in KEYS {
            if let Some(v) = lookup(&format!("{ENV_PREFIX}{}", key.to_uppercase())) {
                self.values.insert(key.to_string(), v);
            }
        }
    }

    pub fn apply_env(&mut self) {
        self.apply_env_with(|name| std::env::var(name).ok());
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn parsed<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.to_string(),
                    value: v.to_string(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }

    /// `on`/`off` (also `true`/`false`, `yes`/`no`, `1`/`0`).
    pub fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|v| {
                parse_switch(v).ok_or_else(|| ConfigError::Value {
                    key: key.to_string(),
                    value: v.to_string(),
                    message: "expected on or off".into(),
                })
            })
            .transpose()
    }
}

pub fn parse_switch(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}
