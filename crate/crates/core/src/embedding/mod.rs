//! Term and document vectors.
//!
//! Term vectors are composed from character n-gram features so that
//! shortenings and inflections of a word land near the word itself. Query
//! vectors are the plain mean of their term vectors; document vectors are the
//! TF-IDF weighted mean. Every non-zero vector returned here is unit length.

mod file;
mod hashed;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use file::FileProvider;
pub use hashed::{fnv1a64, splitmix64, HashedProvider};

pub const NGRAM_MIN: usize = 3;
pub const NGRAM_MAX: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid provider parameter: {0}")]
    InvalidParameter(String),
}

/// A term with its vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    pub term: String,
    pub components: Vec<f32>,
}

/// How to reconstruct a provider; stored in index manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProviderSpec {
    Hashed { seed: u64, dim: usize },
    File { path: PathBuf, fallback_seed: u64 },
}

impl ProviderSpec {
    pub fn build(&self) -> Result<Arc<dyn EmbeddingProvider>, EmbeddingError> {
        Ok(match self {
            ProviderSpec::Hashed { seed, dim } => Arc::new(HashedProvider::new(*seed, *dim)?),
            ProviderSpec::File {
                path,
                fallback_seed,
            } => Arc::new(FileProvider::load(path, *fallback_seed)?),
        })
    }
}

/// Source of term vectors. Implementations must return the same vector for
/// the same term for as long as their fingerprint is unchanged.
pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;

    /// Stable hash of provider identity and parameters.
    fn fingerprint(&self) -> &str;

    fn spec(&self) -> ProviderSpec;

    /// Unit-length vector for `term`, or the zero vector when the term cannot
    /// be represented.
    fn embed(&self, term: &str) -> Vec<f32>;

    fn vector(&self, term: &str) -> TermVector {
        TermVector {
            term: term.to_string(),
            components: self.embed(term),
        }
    }
}

/// Character n-grams of `<term>` for lengths `n_min..=n_max`, shorter
/// lengths first, followed by the whole wrapped term as an extra feature.
pub fn char_ngrams(term: &str, n_min: usize, n_max: usize) -> Vec<String> {
    let wrapped: Vec<char> = std::iter::once('<')
        .chain(term.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut out = Vec::new();
    for n in n_min.max(1)..=n_max {
        if n > wrapped.len() {
            break;
        }
        out.extend(wrapped.windows(n).map(|w| w.iter().collect::<String>()));
    }
    out.push(wrapped.iter().collect());
    out
}

/// Scales to unit length and narrows to `f32`; zero stays zero.
pub(crate) fn normalize_to_f32(acc: &[f64]) -> Vec<f32> {
    let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return vec![0.0; acc.len()];
    }
    acc.iter().map(|x| (x / norm) as f32).collect()
}

pub fn l2_norm(v: &[f32]) -> f64 {
    v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt()
}

/// Cosine similarity accumulated in `f64`; 0 when either side is zero.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Unweighted mean of the term vectors, scaled to unit length.
pub fn embed_query<S: AsRef<str>>(terms: &[S], provider: &dyn EmbeddingProvider) -> Vec<f32> {
    let mut acc = vec![0.0f64; provider.dim()];
    for t in terms {
        for (a, x) in acc.iter_mut().zip(provider.embed(t.as_ref())) {
            *a += f64::from(x);
        }
    }
    if !terms.is_empty() {
        let n = terms.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
    }
    normalize_to_f32(&acc)
}

/// TF-IDF weighted mean of term vectors. Terms missing from `idf` weigh
/// nothing. Summation runs in sorted term order so the result does not
/// depend on how the counts were collected.
pub fn embed_document(
    term_counts: &BTreeMap<String, u32>,
    idf: &HashMap<String, f64>,
    provider: &dyn EmbeddingProvider,
) -> Vec<f32> {
    embed_weighted(
        term_counts
            .iter()
            .map(|(t, &tf)| (t.as_str(), f64::from(tf) * idf.get(t).copied().unwrap_or(0.0))),
        provider.dim(),
        |t| provider.embed(t),
    )
}

/// Weighted mean over `(term, weight)` pairs, taken in the given order.
pub(crate) fn embed_weighted<'a>(
    weighted: impl IntoIterator<Item = (&'a str, f64)>,
    dim: usize,
    mut vector: impl FnMut(&str) -> Vec<f32>,
) -> Vec<f32> {
    let mut acc = vec![0.0f64; dim];
    let mut mass = 0.0f64;
    for (term, w) in weighted {
        if w <= 0.0 {
            continue;
        }
        mass += w;
        for (a, x) in acc.iter_mut().zip(vector(term)) {
            *a += w * f64::from(x);
        }
    }
    if mass == 0.0 {
        return vec![0.0; dim];
    }
    acc.iter_mut().for_each(|a| *a /= mass);
    normalize_to_f32(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ngrams_of_auf() {
        assert_eq!(
            char_ngrams("auf", 3, 5),
            ["<au", "auf", "uf>", "<auf", "auf>", "<auf>", "<auf>"]
        );
    }

    #[test]
    fn ngrams_of_short_terms() {
        assert_eq!(char_ngrams("ab", 3, 5), ["<ab", "ab>", "<ab>", "<ab>"]);
        assert_eq!(char_ngrams("x", 3, 5), ["<x>", "<x>"]);
    }

    #[test]
    fn ngrams_count_chars_not_bytes() {
        let g = char_ngrams("Öl", 3, 5);
        assert_eq!(g, ["<Öl", "Öl>", "<Öl>", "<Öl>"]);
    }

    #[test]
    fn cosine_of_zero_is_zero() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        assert!((cosine(&[1.0, 0.0], &[1.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn query_embedding_basics() {
        let p = HashedProvider::new(1, 64).unwrap();
        let one = embed_query(&["Pumpe"], &p);
        assert_eq!(one, p.embed("Pumpe"));
        let twice = embed_query(&["Pumpe", "Pumpe"], &p);
        assert!((cosine(&one, &twice) - 1.0).abs() < 1e-6);
        let none: [&str; 0] = [];
        assert!(embed_query(&none, &p).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn document_embedding_weights() {
        let p = HashedProvider::new(3, 64).unwrap();
        let single = BTreeMap::from([("Pumpe".to_string(), 3)]);
        let idf = HashMap::from([("Pumpe".to_string(), 1.7), ("Ventil".to_string(), 0.0)]);
        assert!((cosine(&embed_document(&single, &idf, &p), &p.embed("Pumpe")) - 1.0).abs() < 1e-6);

        let with_zero = BTreeMap::from([("Pumpe".to_string(), 1), ("Ventil".to_string(), 4)]);
        let v = embed_document(&with_zero, &idf, &p);
        assert!((cosine(&v, &p.embed("Pumpe")) - 1.0).abs() < 1e-6);

        let empty = BTreeMap::new();
        assert!(embed_document(&empty, &idf, &p).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn document_embedding_hand_arithmetic() {
        // {a:2, b:1}, idf {a:1, b:2} -> normalize((2 v_a + 2 v_b) / 4)
        let p = HashedProvider::new(5, 32).unwrap();
        let counts = BTreeMap::from([("a".to_string(), 2), ("b".to_string(), 1)]);
        let idf = HashMap::from([("a".to_string(), 1.0), ("b".to_string(), 2.0)]);
        let got = embed_document(&counts, &idf, &p);
        let (va, vb) = (p.embed("a"), p.embed("b"));
        let expect: Vec<f64> = va
            .iter()
            .zip(&vb)
            .map(|(&x, &y)| (2.0 * f64::from(x) + 2.0 * f64::from(y)) / 4.0)
            .collect();
        let expect = normalize_to_f32(&expect);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-6);
        }
        assert!((l2_norm(&got) - 1.0).abs() < 1e-6);
    }
}
