//! The immutable search index.
//!
//! An [`Index`] holds boolean postings over every normalized token, the
//! per-record semantic term sets and TF-IDF weighted document vectors, and
//! the record store itself. Lexical term statistics for the keyword and BM25
//! baselines are derived from the stored records whenever an index is built
//! or loaded.

mod lexical;
mod persist;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::corpus::{CorpusError, Dictionary, Record};
use crate::embedding::{embed_weighted, EmbeddingError, EmbeddingProvider, ProviderSpec};
use crate::preprocess::{
    classify_token, expand_record, normalize, tokenize, NormalizationConfig, PreprocessError,
    TokenKind,
};

pub(crate) use lexical::{bm25_terms, keyword_terms, LexicalViews};
pub use persist::{load_index, read_manifest, save_index, Manifest, FORMAT_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("empty collection: an index needs at least one record")]
    EmptyCollection,
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported index format version {found} (supported: {supported:?})")]
    UnsupportedVersion { found: u32, supported: Vec<u32> },
    #[error("dimension mismatch: manifest says {manifest}, {other} says {found}")]
    DimensionMismatch {
        manifest: usize,
        other: &'static str,
        found: usize,
    },
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error(
        "provider fingerprint mismatch: index was built with {index}, query provider is {provider}"
    )]
    FingerprintMismatch { index: String, provider: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Build-time settings captured in the index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexConfig {
    pub normalization: NormalizationConfig,
}

impl IndexConfig {
    pub fn new(normalization: NormalizationConfig) -> Self {
        Self { normalization }
    }

    /// Hex SHA-256 over stopwords, lemma table and case handling.
    pub fn config_hash(&self) -> String {
        let n = &self.normalization;
        let mut h = Sha256::new();
        h.update(format!("preserve_case={}\n", n.preserve_case));
        for s in n.stopwords() {
            h.update(b"s\t");
            h.update(s.as_bytes());
            h.update(b"\n");
        }
        for (s, l) in n.lemmas() {
            h.update(format!("l\t{s}\t{l}\n"));
        }
        hex::encode(h.finalize())
    }
}

/// `ln((1 + N) / (1 + df)) + 1`; positive for every `df <= N`.
pub fn smoothed_idf(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Postings key of a normalized term: Word terms keep their case, terms with
/// digits are case-folded.
pub fn postings_key(term: &str) -> String {
    if classify_token(term).has_digit() {
        term.to_lowercase()
    } else {
        term.to_string()
    }
}

pub struct Index {
    records: Vec<Record>,
    dictionary: Dictionary,
    config: IndexConfig,
    provider: ProviderSpec,
    fingerprint: String,
    dim: usize,
    postings: BTreeMap<String, Vec<u32>>,
    doc_terms: Vec<Vec<String>>,
    doc_vectors: Vec<f32>,
    ordinals: HashMap<String, u32>,
    folded_vocab: HashMap<String, Vec<String>>,
    lexical_plain: LexicalViews,
    lexical_expanded: LexicalViews,
}

impl std::fmt::Debug for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Index")
            .field("doc_count", &self.records.len())
            .field("vocabulary", &self.postings.len())
            .field("dim", &self.dim)
            .field("fingerprint", &self.fingerprint)
            .finish()
    }
}

struct DocAnalysis {
    keys: BTreeSet<String>,
    counts: BTreeMap<String, u32>,
}

fn analyze(record: &Record, dictionary: &Dictionary, config: &IndexConfig) -> DocAnalysis {
    let text = expand_record(record, dictionary).text();
    let tokens = normalize(tokenize(&text), &config.normalization);
    let mut keys = BTreeSet::new();
    let mut counts = BTreeMap::new();
    for t in tokens {
        keys.insert(postings_key(&t.normalized));
        if t.kind != TokenKind::Numeric {
            *counts.entry(t.normalized).or_insert(0) += 1;
        }
    }
    DocAnalysis { keys, counts }
}

/// Builds an index: context expansion, tokenization and normalization per
/// record, postings over all tokens, smoothed IDF, and a TF-IDF weighted
/// document vector over Word and Code terms.
pub fn build_index(
    records: &[Record],
    dictionary: &Dictionary,
    provider: &dyn EmbeddingProvider,
    config: &IndexConfig,
) -> Result<Index, IndexError> {
    if records.is_empty() {
        return Err(IndexError::EmptyCollection);
    }
    crate::corpus::validate_records(records, &(1..=records.len()).collect::<Vec<_>>())?;

    let docs: Vec<DocAnalysis> = records.iter().map(|r| analyze(r, dictionary, config)).collect();
    let mut postings: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        for k in &d.keys {
            postings.entry(k.clone()).or_default().push(i as u32);
        }
    }

    let n = records.len();
    let mut idf: HashMap<&str, f64> = HashMap::new();
    let mut vectors: HashMap<&str, Vec<f32>> = HashMap::new();
    for d in &docs {
        for term in d.counts.keys() {
            if !idf.contains_key(term.as_str()) {
                let df = postings.get(&postings_key(term)).map_or(0, Vec::len);
                idf.insert(term, smoothed_idf(n, df));
                vectors.insert(term, provider.embed(term));
            }
        }
    }

    let dim = provider.dim();
    let mut doc_vectors = Vec::with_capacity(n * dim);
    for d in &docs {
        let v = embed_weighted(
            d.counts.iter().map(|(t, &tf)| (t.as_str(), f64::from(tf) * idf[t.as_str()])),
            dim,
            |t| vectors[t].clone(),
        );
        doc_vectors.extend(v);
    }
    let doc_terms = docs
        .into_iter()
        .map(|d| d.counts.into_keys().collect())
        .collect();

    Ok(Index::assemble(
        records.to_vec(),
        dictionary.clone(),
        config.clone(),
        provider.spec(),
        provider.fingerprint().to_string(),
        dim,
        postings,
        doc_terms,
        doc_vectors,
    ))
}

impl Index {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        records: Vec<Record>,
        dictionary: Dictionary,
        config: IndexConfig,
        provider: ProviderSpec,
        fingerprint: String,
        dim: usize,
        postings: BTreeMap<String, Vec<u32>>,
        doc_terms: Vec<Vec<String>>,
        doc_vectors: Vec<f32>,
    ) -> Self {
        let ordinals = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i as u32))
            .collect();
        let mut folded_vocab: HashMap<String, Vec<String>> = HashMap::new();
        for k in postings.keys() {
            folded_vocab.entry(k.to_lowercase()).or_default().push(k.clone());
        }
        let lexical_plain = LexicalViews::build(&records, None, &config.normalization);
        let lexical_expanded =
            LexicalViews::build(&records, Some(&dictionary), &config.normalization);
        Self {
            records,
            dictionary,
            config,
            provider,
            fingerprint,
            dim,
            postings,
            doc_terms,
            doc_vectors,
            ordinals,
            folded_vocab,
            lexical_plain,
            lexical_expanded,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.records.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn record(&self, ordinal: u32) -> &Record {
        &self.records[ordinal as usize]
    }

    pub fn ordinal(&self, record_id: &str) -> Option<u32> {
        self.ordinals.get(record_id).copied()
    }

    pub fn record_by_id(&self, record_id: &str) -> Option<&Record> {
        self.ordinal(record_id).map(|o| self.record(o))
    }

    pub fn timestamp(&self, ordinal: u32) -> i64 {
        self.records[ordinal as usize].timestamp
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn normalization(&self) -> &NormalizationConfig {
        &self.config.normalization
    }

    pub fn provider_spec(&self) -> &ProviderSpec {
        &self.provider
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn postings(&self) -> &BTreeMap<String, Vec<u32>> {
        &self.postings
    }

    /// Documents containing `key` (an exact postings key).
    pub fn posting(&self, key: &str) -> Option<&[u32]> {
        self.postings.get(key).map(Vec::as_slice)
    }

    pub fn df(&self, key: &str) -> usize {
        self.postings.get(key).map_or(0, Vec::len)
    }

    /// Smoothed IDF of a normalized term.
    pub fn idf(&self, term: &str) -> f64 {
        smoothed_idf(self.doc_count(), self.df(&postings_key(term)))
    }

    /// Postings keys that equal `term` ignoring case.
    pub fn vocabulary_matches(&self, term: &str) -> &[String] {
        self.folded_vocab
            .get(&term.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    /// Sorted, deduplicated normalized Word and Code terms of a record.
    pub fn doc_terms(&self, ordinal: u32) -> &[String] {
        &self.doc_terms[ordinal as usize]
    }

    pub fn doc_vector(&self, ordinal: u32) -> &[f32] {
        let start = ordinal as usize * self.dim;
        &self.doc_vectors[start..start + self.dim]
    }

    pub(crate) fn lexical(&self, expanded: bool) -> &LexicalViews {
        if expanded {
            &self.lexical_expanded
        } else {
            &self.lexical_plain
        }
    }

    /// Errors unless `provider` matches the one the index was built with.
    pub fn check_provider(&self, provider: &dyn EmbeddingProvider) -> Result<(), IndexError> {
        if provider.fingerprint() != self.fingerprint {
            return Err(IndexError::FingerprintMismatch {
                index: self.fingerprint.clone(),
                provider: provider.fingerprint().to_string(),
            });
        }
        Ok(())
    }
}
