use std::collections::HashMap;

use super::{assign_ranks, result_order, SearchConfig, SearchError, SearchOutcome, SearchResult};
use crate::index::{bm25_terms, keyword_terms, Index};
use crate::preprocess::expand_query_text;

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;
/// Minimum max-normalized BM25 score for a document to be retrieved.
pub const BM25_THRESHOLD: f64 = 0.15;

fn query_text(raw: &str, index: &Index, config: &SearchConfig) -> String {
    if config.query_expansion {
        expand_query_text(raw, index.dictionary())
    } else {
        raw.to_string()
    }
}

fn dedup(terms: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(terms.len());
    for t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn finish(index: &Index, mut scored: Vec<(f64, u32)>, page_size: usize) -> SearchOutcome {
    scored.sort_by(|&a, &b| result_order(index, a, b));
    let matched = scored.len();
    scored.truncate(page_size);
    let mut results: Vec<SearchResult> = scored
        .into_iter()
        .map(|(score, o)| SearchResult {
            record_id: index.record(o).id.clone(),
            ordinal: o,
            timestamp: index.timestamp(o),
            doc_sim: 0.0,
            term_sim: 0.0,
            score,
            rank: 0,
        })
        .collect();
    assign_ranks(&mut results);
    SearchOutcome { results, matched }
}

/// Lowercased exact term match: a document is retrieved when it shares at
/// least one term with the query and ranked by the number of shared terms,
/// then by timestamp. Score is the shared fraction of query terms.
pub fn keyword_search(
    raw: &str,
    index: &Index,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let cfg = index.normalization();
    let terms = dedup(keyword_terms(&query_text(raw, index, config), cfg));
    if terms.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let view = &index.lexical(config.query_expansion).keyword;
    let mut overlap: HashMap<u32, u32> = HashMap::new();
    for t in &terms {
        for &(doc, _) in view.postings.get(t).map(Vec::as_slice).unwrap_or_default() {
            *overlap.entry(doc).or_insert(0) += 1;
        }
    }
    let n = terms.len() as f64;
    let scored = overlap
        .into_iter()
        .map(|(doc, c)| (f64::from(c) / n, doc))
        .collect();
    Ok(finish(index, scored, config.page_size))
}

/// Okapi BM25 over lowercased lemmas. Scores are divided by the best score
/// of the query and documents below [`BM25_THRESHOLD`] are dropped.
pub fn bm25_search(
    raw: &str,
    index: &Index,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let cfg = index.normalization();
    let terms = dedup(bm25_terms(&query_text(raw, index, config), cfg));
    if terms.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let view = &index.lexical(config.query_expansion).bm25;
    let n = index.doc_count() as f64;
    let mut scores: HashMap<u32, f64> = HashMap::new();
    for t in &terms {
        let Some(postings) = view.postings.get(t) else {
            continue;
        };
        let df = postings.len() as f64;
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        for &(doc, tf) in postings {
            let tf = f64::from(tf);
            let len_norm = if view.avg_len > 0.0 {
                f64::from(view.doc_len[doc as usize]) / view.avg_len
            } else {
                0.0
            };
            let s = idf * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * len_norm));
            *scores.entry(doc).or_insert(0.0) += s;
        }
    }
    let max = scores.values().copied().fold(0.0f64, f64::max);
    let scored = if max > 0.0 {
        scores
            .into_iter()
            .map(|(doc, s)| (s / max, doc))
            .filter(|&(s, _)| s >= BM25_THRESHOLD)
            .collect()
    } else {
        Vec::new()
    };
    Ok(finish(index, scored, config.page_size))
}
