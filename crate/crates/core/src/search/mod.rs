//! Query parsing, two-stage semantic retrieval with harmonic-mean ranking,
//! and the keyword and BM25 baselines.

mod baselines;
mod semantic;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::Dictionary;
use crate::embedding::{embed_query, EmbeddingProvider};
use crate::eval::{RunEntry, RunFile};
use crate::index::{Index, IndexError};
use crate::preprocess::{expand_query_text, normalize, tokenize, NormalizationConfig, TokenKind};

pub use baselines::{bm25_search, keyword_search, BM25_B, BM25_K1, BM25_THRESHOLD};
pub use semantic::{harmonic_mean, rank, retrieve_candidates, term_similarity, term_similarity_for};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("empty query")]
    EmptyQuery,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Semantic,
    Bm25,
    Keyword,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Semantic, Method::Bm25, Method::Keyword];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Semantic => "semantic",
            Method::Bm25 => "bm25",
            Method::Keyword => "keyword",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "semantic" => Ok(Method::Semantic),
            "bm25" => Ok(Method::Bm25),
            "keyword" => Ok(Method::Keyword),
            other => Err(SearchError::InvalidConfig(format!(
                "unknown method {other:?} (expected semantic, bm25 or keyword)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Number of most similar candidates kept for term-level ranking.
    pub k: usize,
    pub page_size: usize,
    /// Context expansion of the query (and, for the baselines, of the
    /// documents as well).
    pub query_expansion: bool,
    pub method: Method,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k: 200,
            page_size: 20,
            query_expansion: true,
            method: Method::Semantic,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.page_size == 0 || self.page_size > self.k {
            return Err(SearchError::InvalidConfig(format!(
                "page size must lie in 1..={} (K), got {}",
                self.k, self.page_size
            )));
        }
        Ok(())
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_expansion(mut self, on: bool) -> Self {
        self.query_expansion = on;
        self
    }

    pub fn with_page_size(mut self, page_size: usize) -> Self {
        self.page_size = page_size;
        self
    }
}

/// A parsed query: exact-match terms and the semantic terms with their mean
/// vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub raw: String,
    /// Digit-containing and quoted terms, case-folded.
    pub exact_terms: BTreeSet<String>,
    /// Normalized Word and Code terms in order of first appearance.
    pub semantic_terms: Vec<String>,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub record_id: String,
    #[serde(skip)]
    pub ordinal: u32,
    pub timestamp: i64,
    pub doc_sim: f64,
    pub term_sim: f64,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub results: Vec<SearchResult>,
    /// Documents retrieved before truncation to the page size.
    pub matched: usize,
}

/// Result order: score descending, then newer first, then record id.
pub(crate) fn result_order(
    index: &Index,
    (sa, a): (f64, u32),
    (sb, b): (f64, u32),
) -> Ordering {
    sb.total_cmp(&sa)
        .then_with(|| index.timestamp(b).cmp(&index.timestamp(a)))
        .then_with(|| index.record(a).id.cmp(&index.record(b).id))
}

pub(crate) fn assign_ranks(results: &mut [SearchResult]) {
    for (i, r) in results.iter_mut().enumerate() {
        r.rank = i + 1;
    }
}

/// Re-sorts results newest first (ties by record id) and renumbers ranks.
pub fn order_by_time(results: &mut [SearchResult]) {
    results.sort_by(|a, b| {
        b.timestamp
            .cmp(&a.timestamp)
            .then_with(|| a.record_id.cmp(&b.record_id))
    });
    assign_ranks(results);
}

/// Splits `"..."` segments off the raw text. Returns the remaining text with
/// quoted parts blanked out and the quoted contents.
fn split_quotes(raw: &str) -> (String, Vec<String>) {
    let mut rest = String::with_capacity(raw.len());
    let mut quoted = Vec::new();
    let mut parts = raw.split('"');
    if let Some(first) = parts.next() {
        rest.push_str(first);
    }
    let parts: Vec<&str> = parts.collect();
    let n = parts.len();
    for (i, p) in parts.into_iter().enumerate() {
        // even index: inside quotes, unless it is an unterminated tail
        if i % 2 == 0 && i + 1 < n {
            quoted.push(p.to_string());
            rest.push(' ');
        } else {
            rest.push(' ');
            rest.push_str(p);
        }
    }
    (rest, quoted)
}

/// Parses a raw query: quoted tokens become exact-match terms, the rest is
/// optionally context-expanded, tokenized and normalized; digit-containing
/// tokens are exact-match terms, Word and Code tokens are semantic terms.
pub fn parse_query(
    raw: &str,
    dictionary: &Dictionary,
    normalization: &NormalizationConfig,
    provider: &dyn EmbeddingProvider,
    expansion: bool,
) -> Result<Query, SearchError> {
    if raw.trim().is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let (unquoted, quoted) = split_quotes(raw);
    let mut exact_terms = BTreeSet::new();
    for q in &quoted {
        for t in tokenize(q) {
            let folded = match t.kind {
                TokenKind::Word => normalization.lemma(&t.surface).to_lowercase(),
                _ => t.surface.to_lowercase(),
            };
            exact_terms.insert(folded);
        }
    }
    let text = if expansion {
        expand_query_text(&unquoted, dictionary)
    } else {
        unquoted
    };
    let mut semantic_terms: Vec<String> = Vec::new();
    for t in normalize(tokenize(&text), normalization) {
        if t.kind.has_digit() {
            exact_terms.insert(t.normalized.to_lowercase());
        }
        if t.kind != TokenKind::Numeric && !semantic_terms.contains(&t.normalized) {
            semantic_terms.push(t.normalized);
        }
    }
    if exact_terms.is_empty() && semantic_terms.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let vector = embed_query(&semantic_terms, provider);
    Ok(Query {
        raw: raw.to_string(),
        exact_terms,
        semantic_terms,
        vector,
    })
}

/// An index paired with the embedding provider it was built with, plus a
/// cache of vectors for every document term.
pub struct Searcher {
    index: Arc<Index>,
    provider: Arc<dyn EmbeddingProvider>,
    term_rows: HashMap<String, u32>,
    term_vectors: Vec<f32>,
    doc_term_rows: Vec<Vec<u32>>,
}

impl fmt::Debug for Searcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Searcher")
            .field("index", &self.index)
            .field("cached_terms", &self.term_rows.len())
            .finish()
    }
}

impl Searcher {
    /// Fails when the provider fingerprint differs from the index's.
    pub fn new(index: Arc<Index>, provider: Arc<dyn EmbeddingProvider>) -> Result<Self, SearchError> {
        index.check_provider(provider.as_ref())?;
        let mut term_rows = HashMap::new();
        let mut term_vectors = Vec::new();
        let mut doc_term_rows = Vec::with_capacity(index.doc_count());
        for ord in 0..index.doc_count() as u32 {
            let rows = index
                .doc_terms(ord)
                .iter()
                .map(|t| {
                    *term_rows.entry(t.clone()).or_insert_with(|| {
                        term_vectors.extend(provider.embed(t));
                        (term_vectors.len() / provider.dim() - 1) as u32
                    })
                })
                .collect();
            doc_term_rows.push(rows);
        }
        Ok(Self {
            index,
            provider,
            term_rows,
            term_vectors,
            doc_term_rows,
        })
    }

    /// Builds the provider from the index manifest.
    pub fn from_index(index: Arc<Index>) -> Result<Self, SearchError> {
        let provider = index
            .provider_spec()
            .build()
            .map_err(IndexError::from)?;
        Self::new(index, provider)
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn shared_index(&self) -> Arc<Index> {
        Arc::clone(&self.index)
    }

    pub fn provider(&self) -> &dyn EmbeddingProvider {
        self.provider.as_ref()
    }

    pub(crate) fn doc_term_vectors(&self, ordinal: u32) -> impl Iterator<Item = &[f32]> + Clone + '_ {
        let dim = self.provider.dim();
        self.doc_term_rows[ordinal as usize]
            .iter()
            .map(move |&r| &self.term_vectors[r as usize * dim..(r as usize + 1) * dim])
    }

    pub(crate) fn term_vector(&self, term: &str) -> Vec<f32> {
        match self.term_rows.get(term) {
            Some(&r) => {
                let dim = self.provider.dim();
                self.term_vectors[r as usize * dim..(r as usize + 1) * dim].to_vec()
            }
            None => self.provider.embed(term),
        }
    }

    pub fn parse(&self, raw: &str, expansion: bool) -> Result<Query, SearchError> {
        parse_query(
            raw,
            self.index.dictionary(),
            self.index.normalization(),
            self.provider.as_ref(),
            expansion,
        )
    }

    /// Runs `raw` with the configured method.
    pub fn search(&self, raw: &str, config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
        config.validate()?;
        match config.method {
            Method::Semantic => {
                let query = self.parse(raw, config.query_expansion)?;
                Ok(self.semantic(&query, config))
            }
            Method::Keyword => keyword_search(raw, self.index(), config),
            Method::Bm25 => bm25_search(raw, self.index(), config),
        }
    }

    /// Runs every `(query_id, text)` pair and collects the result pages into
    /// a run. Queries without any usable term get an empty ranking.
    pub fn run(
        &self,
        queries: &[(String, String)],
        config: &SearchConfig,
        tag: &str,
    ) -> Result<RunFile, SearchError> {
        let mut run = RunFile::new(tag);
        for (qid, text) in queries {
            let results = match self.search(text, config) {
                Ok(outcome) => outcome.results,
                Err(SearchError::EmptyQuery) => Vec::new(),
                Err(e) => return Err(e),
            };
            let entries = results
                .into_iter()
                .map(|r| RunEntry {
                    record_id: r.record_id,
                    score: r.score,
                })
                .collect();
            run.insert(qid.clone(), entries)
                .expect("result pages are sorted by score");
        }
        Ok(run)
    }

    /// Candidate retrieval followed by ranking.
    pub fn semantic(&self, query: &Query, config: &SearchConfig) -> SearchOutcome {
        let candidates = retrieve_candidates(query, &self.index);
        let matched = if query.semantic_terms.is_empty() {
            candidates.len()
        } else {
            candidates.len().min(config.k)
        };
        SearchOutcome {
            results: rank(query, &candidates, self, config),
            matched,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FunctionalLocationEntry;
    use crate::embedding::HashedProvider;

    fn dict() -> Dictionary {
        Dictionary::new(vec![FunctionalLocationEntry::new(
            "PLANT1-R105.12",
            "R105.12",
            "Reaktor",
        )])
    }

    fn parse(raw: &str, expansion: bool) -> Result<Query, SearchError> {
        let p = HashedProvider::new(1, 32).unwrap();
        parse_query(raw, &dict(), &NormalizationConfig::default(), &p, expansion)
    }

    #[test]
    fn parse_with_expansion() {
        let q = parse("R105.12 Leckage", true).unwrap();
        assert_eq!(q.exact_terms, BTreeSet::from(["r105.12".to_string()]));
        assert_eq!(q.semantic_terms, ["Reaktor", "R105.12", "Leckage"]);
        let q = parse("R105.12 Leckage", false).unwrap();
        assert_eq!(q.semantic_terms, ["R105.12", "Leckage"]);
    }

    #[test]
    fn quotes_force_exact_match() {
        let q = parse("\"Pumpe\" defekt", true).unwrap();
        assert_eq!(q.exact_terms, BTreeSet::from(["pumpe".to_string()]));
        assert_eq!(q.semantic_terms, ["defekt"]);
    }

    #[test]
    fn numeric_terms_are_exact_only() {
        let q = parse("Druck 4.5 bar", true).unwrap();
        assert_eq!(q.exact_terms, BTreeSet::from(["4.5".to_string()]));
        assert_eq!(q.semantic_terms, ["Druck", "bar"]);
    }

    #[test]
    fn empty_queries() {
        for raw in ["", "   ", "die und", "\"\"", "?!"] {
            assert!(matches!(parse(raw, true), Err(SearchError::EmptyQuery)), "{raw:?}");
        }
        assert_eq!(SearchError::EmptyQuery.to_string(), "empty query");
    }

    #[test]
    fn unterminated_quote_is_plain_text() {
        let (rest, quoted) = split_quotes("a \"b\" c \"d");
        assert_eq!(quoted, ["b"]);
        assert!(rest.contains('a') && rest.contains('c') && rest.contains('d'));
        assert!(!rest.contains('b'));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        assert!(SearchConfig::default().with_page_size(0).validate().is_err());
        assert!(SearchConfig::default().with_page_size(201).validate().is_err());
        assert_eq!("BM25".parse::<Method>().unwrap(), Method::Bm25);
        assert!("fuzzy".parse::<Method>().is_err());
    }
}
