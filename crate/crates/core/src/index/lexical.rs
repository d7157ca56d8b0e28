use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Dictionary, Record};
use crate::preprocess::{expand_record, tokenize, NormalizationConfig, TokenKind};

/// Lowercased tokens without stopwords. No lemmatization.
pub(crate) fn keyword_terms(text: &str, config: &NormalizationConfig) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Word || !config.is_stopword(&t.surface))
        .map(|t| t.surface.to_lowercase())
        .collect()
}

/// Lowercased lemmas of every token.
pub(crate) fn bm25_terms(text: &str, config: &NormalizationConfig) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| match t.kind {
            TokenKind::Word => config.lemma(&t.surface).to_lowercase(),
            _ => t.surface.to_lowercase(),
        })
        .collect()
}

/// Term frequencies per document for one lexical analysis.
#[derive(Debug, Clone, Default)]
pub(crate) struct LexicalIndex {
    /// Term to `(ordinal, tf)` pairs in ascending ordinal order.
    pub postings: HashMap<String, Vec<(u32, u32)>>,
    pub doc_len: Vec<u32>,
    pub avg_len: f64,
}

impl LexicalIndex {
    fn from_docs(docs: impl Iterator<Item = Vec<String>>) -> Self {
        let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        let mut doc_len = Vec::new();
        for (i, terms) in docs.enumerate() {
            doc_len.push(terms.len() as u32);
            let mut tf: BTreeMap<String, u32> = BTreeMap::new();
            for t in terms {
                *tf.entry(t).or_insert(0) += 1;
            }
            for (t, c) in tf {
                postings.entry(t).or_default().push((i as u32, c));
            }
        }
        let avg_len = if doc_len.is_empty() {
            0.0
        } else {
            doc_len.iter().map(|&l| f64::from(l)).sum::<f64>() / doc_len.len() as f64
        };
        Self {
            postings,
            doc_len,
            avg_len,
        }
    }
}

/// Keyword and BM25 term statistics over the same record texts.
#[derive(Debug, Clone, Default)]
pub(crate) struct LexicalViews {
    pub keyword: LexicalIndex,
    pub bm25: LexicalIndex,
}

impl LexicalViews {
    /// With a dictionary the record texts are context-expanded first.
    pub fn build(
        records: &[Record],
        dictionary: Option<&Dictionary>,
        config: &NormalizationConfig,
    ) -> Self {
        let texts: Vec<String> = records
            .iter()
            .map(|r| match dictionary {
                Some(d) => expand_record(r, d).text(),
                None => r.text(),
            })
            .collect();
        Self {
            keyword: LexicalIndex::from_docs(texts.iter().map(|t| keyword_terms(t, config))),
            bm25: LexicalIndex::from_docs(texts.iter().map(|t| bm25_terms(t, config))),
        }
    }
}
