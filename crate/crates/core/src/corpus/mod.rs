//! Record collections and functional-location dictionaries.
//!
//! Records are read from delimited tables or JSON-lines files, validated on
//! load, and can be profiled with [`corpus_stats`] or synthesized with
//! [`generate_synthetic_corpus`].

mod io;
mod stats;
mod synthetic;

use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use io::{
    load_corpus, load_dictionary, load_dictionary_with, read_corpus, read_dictionary, save_corpus,
    save_dictionary, write_corpus, write_dictionary, CorpusFormat,
};
pub use stats::{corpus_stats, CorpusStats, TokenKindShares};
pub use synthetic::{generate_synthetic_corpus, shortening_pairs, ShorteningPair, SyntheticBenchmark};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("row {row}: missing id")]
    MissingId { row: usize },
    #[error("duplicate id {id:?} at rows {first} and {second}")]
    DuplicateId {
        id: String,
        first: usize,
        second: usize,
    },
    #[error("row {row}: invalid timestamp {value:?}")]
    InvalidTimestamp { row: usize, value: String },
    #[error("row {row}: duplicate long_id {long_id:?} (first seen at row {first})")]
    DuplicateLongId {
        long_id: String,
        row: usize,
        first: usize,
    },
    #[error("row {row}: {column} must not be empty")]
    EmptyColumn { row: usize, column: &'static str },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// One named free-text field of a record body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub text: String,
}

impl Field {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            text: text.into(),
        }
    }
}

/// A semi-structured log entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    /// UTC epoch seconds, never negative.
    pub timestamp: i64,
    /// Long functional-location IDs attached by the author.
    #[serde(default)]
    pub attributes: Vec<String>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub body: Vec<Field>,
}

impl Record {
    /// Title followed by every body field, newline separated. Empty parts are
    /// skipped.
    pub fn text(&self) -> String {
        join_text(&self.title, &self.body)
    }

    /// Number of characters in the title and body fields, separators excluded.
    pub fn char_len(&self) -> usize {
        self.title.chars().count() + self.body.iter().map(|f| f.text.chars().count()).sum::<usize>()
    }
}

pub(crate) fn join_text(title: &str, body: &[Field]) -> String {
    let mut out = String::new();
    for part in std::iter::once(title).chain(body.iter().map(|f| f.text.as_str())) {
        if part.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(part);
    }
    out
}

/// Dictionary row describing one functional location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionalLocationEntry {
    pub long_id: String,
    pub short_id: String,
    pub description: String,
}

impl FunctionalLocationEntry {
    pub fn new(
        long_id: impl Into<String>,
        short_id: impl Into<String>,
        description: impl Into<String>,
    ) -> Self {
        Self {
            long_id: long_id.into(),
            short_id: short_id.into(),
            description: description.into(),
        }
    }
}

/// Functional-location entries with case-insensitive lookup by long and
/// short ID.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    entries: Vec<FunctionalLocationEntry>,
    by_long: HashMap<String, usize>,
    by_short: HashMap<String, usize>,
}

impl Dictionary {
    /// Builds lookup tables. When several entries share a short ID the first
    /// one wins for in-text lookups.
    pub fn new(entries: Vec<FunctionalLocationEntry>) -> Self {
        let mut by_long = HashMap::with_capacity(entries.len());
        let mut by_short = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            by_long.entry(e.long_id.to_lowercase()).or_insert(i);
            by_short.entry(e.short_id.to_lowercase()).or_insert(i);
        }
        Self {
            entries,
            by_long,
            by_short,
        }
    }

    pub fn entries(&self) -> &[FunctionalLocationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_long_id(&self, long_id: &str) -> Option<&FunctionalLocationEntry> {
        self.by_long
            .get(&long_id.to_lowercase())
            .map(|&i| &self.entries[i])
    }

    pub fn by_short_id(&self, short_id: &str) -> Option<&FunctionalLocationEntry> {
        self.by_short
            .get(&short_id.to_lowercase())
            .map(|&i| &self.entries[i])
    }
}

impl From<Vec<FunctionalLocationEntry>> for Dictionary {
    fn from(entries: Vec<FunctionalLocationEntry>) -> Self {
        Self::new(entries)
    }
}

/// Checks id presence and uniqueness and timestamp sign. `rows` gives the
/// 1-based row number of each record for error messages.
pub(crate) fn validate_records(records: &[Record], rows: &[usize]) -> Result<(), CorpusError> {
    let mut seen: HashMap<&str, usize> = HashMap::with_capacity(records.len());
    for (rec, &row) in records.iter().zip(rows) {
        if rec.id.trim().is_empty() {
            return Err(CorpusError::MissingId { row });
        }
        if rec.timestamp < 0 {
            return Err(CorpusError::InvalidTimestamp {
                row,
                value: rec.timestamp.to_string(),
            });
        }
        if let Some(&first) = seen.get(rec.id.as_str()) {
            return Err(CorpusError::DuplicateId {
                id: rec.id.clone(),
                first,
                second: row,
            });
        }
        seen.insert(&rec.id, row);
    }
    Ok(())
}
