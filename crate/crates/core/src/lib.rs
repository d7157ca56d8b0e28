//! Semantic search over short, semi-structured plant log records.
//!
//! The crate covers the whole pipeline: loading and profiling record
//! collections, tokenization with dictionary-based context expansion,
//! subword-composed term vectors and TF-IDF weighted document vectors, a
//! persisted index, two-stage retrieval with harmonic-mean ranking, keyword
//! and BM25 baselines, relevance assessment and IR metrics, and an HTTP
//! service for interactive search and feedback capture.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `quickstart`.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod embedding;
pub mod eval;
pub mod index;
pub mod preprocess;
pub mod search;
pub mod service;

pub use corpus::{Dictionary, Field, FunctionalLocationEntry, Record};
pub use embedding::{EmbeddingProvider, FileProvider, HashedProvider, ProviderSpec};
pub use index::{build_index, load_index, save_index, Index, IndexConfig};
pub use preprocess::{NormalizationConfig, Token, TokenKind};
pub use search::{Method, Query, SearchConfig, SearchResult, Searcher};
