//! Tokenization, token classification, normalization and dictionary-based
//! context expansion.

mod expand;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use expand::{expand_query_text, expand_record, expand_text, ExpandedRecord, ExpansionReport};

#[derive(Debug, thiserror::Error)]
pub enum PreprocessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    /// Letters and digits mixed, e.g. machinery IDs such as `P5002`.
    Code,
    Numeric,
}

impl TokenKind {
    /// Code and Numeric tokens are matched exactly rather than semantically.
    pub fn has_digit(self) -> bool {
        !matches!(self, TokenKind::Word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lemma when the lemma table maps the surface, otherwise the surface.
    pub normalized: String,
    pub kind: TokenKind,
    /// Character offsets into the source text.
    pub span: Range<usize>,
}

/// Byte and character extent of one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TokenSpan {
    pub bytes: Range<usize>,
    pub chars: Range<usize>,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '.' | '-' | '_' | '/')
}

/// Token boundaries: maximal alphanumeric runs, where `.`, `-`, `_` and `/`
/// stay inside a token only between two alphanumerics.
pub(crate) fn token_spans(text: &str) -> Vec<TokenSpan> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        loop {
            match chars.get(i) {
                Some((_, c)) if c.is_alphanumeric() => i += 1,
                Some((_, c))
                    if is_joiner(*c)
                        && chars.get(i + 1).is_some_and(|(_, n)| n.is_alphanumeric()) =>
                {
                    i += 2
                }
                _ => break,
            }
        }
        spans.push(TokenSpan {
            bytes: byte_at(start)..byte_at(i),
            chars: start..i,
        });
    }
    spans
}

/// Splits text into classified tokens. `normalized` equals the surface until
/// [`normalize`] runs.
pub fn tokenize(text: &str) -> Vec<Token> {
    token_spans(text)
        .into_iter()
        .map(|s| {
            let surface = text[s.bytes].to_string();
            Token {
                kind: classify_token(&surface),
                normalized: surface.clone(),
                surface,
                span: s.chars,
            }
        })
        .collect()
}

/// Letters and digits together make a Code, digits without letters a
/// Numeric, anything else a Word.
pub fn classify_token(surface: &str) -> TokenKind {
    let has_digit = surface.chars().any(char::is_numeric);
    let has_letter = surface.chars().any(char::is_alphabetic);
    match (has_digit, has_letter) {
        (true, true) => TokenKind::Code,
        (true, false) => TokenKind::Numeric,
        _ => TokenKind::Word,
    }
}

/// Articles, common prepositions and coordinating conjunctions.
pub const GERMAN_STOPWORDS: &[&str] = &[
    "der", "die", "das", "den", "dem", "des", "ein", "eine", "einer", "eines", "einem", "einen",
    "an", "am", "auf", "aus", "bei", "beim", "bis", "durch", "für", "gegen", "hinter", "in", "im",
    "ins", "mit", "nach", "neben", "ohne", "seit", "über", "um", "unter", "von", "vom", "vor",
    "während", "wegen", "zu", "zum", "zur", "zwischen", "und", "oder", "aber", "denn", "sondern",
    "sowie", "doch",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationConfig {
    stopwords: BTreeSet<String>,
    lemmas: BTreeMap<String, String>,
    lemmas_folded: HashMap<String, String>,
    pub preserve_case: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self::new(GERMAN_STOPWORDS.iter().copied(), BTreeMap::new())
    }
}

impl NormalizationConfig {
    /// Stopwords are stored lowercased; matching ignores case.
    pub fn new<'a>(
        stopwords: impl IntoIterator<Item = &'a str>,
        lemmas: BTreeMap<String, String>,
    ) -> Self {
        let lemmas_folded = lemmas
            .iter()
            .map(|(k, v)| (k.to_lowercase(), v.clone()))
            .collect();
        Self {
            stopwords: stopwords.into_iter().map(str::to_lowercase).collect(),
            lemmas,
            lemmas_folded,
            preserve_case: true,
        }
    }

    pub fn with_lemmas(mut self, lemmas: BTreeMap<String, String>) -> Self {
        self.lemmas_folded = lemmas
            .iter()
            .map(|(k, v)| (k.to_lowercase(), v.clone()))
            .collect();
        self.lemmas = lemmas;
        self
    }

    pub fn with_stopwords<'a>(mut self, stopwords: impl IntoIterator<Item = &'a str>) -> Self {
        self.stopwords = stopwords.into_iter().map(str::to_lowercase).collect();
        self
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn lemmas(&self) -> &BTreeMap<String, String> {
        &self.lemmas
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    /// Exact lookup first, then case-insensitive.
    pub fn lemma<'a>(&'a self, surface: &'a str) -> &'a str {
        self.lemmas
            .get(surface)
            .or_else(|| self.lemmas_folded.get(&surface.to_lowercase()))
            .map_or(surface, String::as_str)
    }
}

/// Drops stopwords and applies the lemma table to Word tokens. Code and
/// Numeric tokens pass through untouched.
pub fn normalize(tokens: Vec<Token>, config: &NormalizationConfig) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| t.kind != TokenKind::Word || !config.is_stopword(&t.surface))
        .map(|mut t| {
            if t.kind == TokenKind::Word {
                let lemma = config.lemma(&t.surface);
                t.normalized = if config.preserve_case {
                    lemma.to_string()
                } else {
                    lemma.to_lowercase()
                };
            }
            t
        })
        .collect()
}

fn read_to_string(path: &Path) -> Result<String, PreprocessError> {
    fs::read_to_string(path).map_err(|source| PreprocessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One term per line; `#` starts a comment.
pub fn parse_stopwords(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<Vec<String>, PreprocessError> {
    Ok(parse_stopwords(&read_to_string(path)?))
}

/// Two tab-separated columns, surface then lemma. Blank lines and `#`
/// comments are skipped.
pub fn load_lemma_table(path: &Path) -> Result<BTreeMap<String, String>, PreprocessError> {
    let text = read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(s), Some(l), None) if !s.trim().is_empty() && !l.trim().is_empty() => {
                out.insert(s.trim().to_string(), l.trim().to_string());
            }
            _ => {
                return Err(PreprocessError::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "expected two tab-separated columns".into(),
                })
            }
        }
    }
    Ok(out)
}

pub fn format_lemma_table(lemmas: &BTreeMap<String, String>) -> String {
    lemmas
        .iter()
        .map(|(s, l)| format!("{s}\t{l}\n"))
        .collect()
}
