use super::{assign_ranks, result_order, Query, SearchConfig, SearchResult, Searcher};
use crate::embedding::{cosine, EmbeddingProvider};
use crate::index::Index;

/// Boolean candidate selection. Exact-match terms missing from the
/// vocabulary are dropped; if none remain every document is a candidate,
/// otherwise the documents containing all remaining terms are.
pub fn retrieve_candidates(query: &Query, index: &Index) -> Vec<u32> {
    let mut lists: Vec<Vec<u32>> = query
        .exact_terms
        .iter()
        .filter_map(|t| {
            let keys = index.vocabulary_matches(t);
            if keys.is_empty() {
                return None;
            }
            let mut docs: Vec<u32> = keys
                .iter()
                .flat_map(|k| index.posting(k).unwrap_or_default().iter().copied())
                .collect();
            docs.sort_unstable();
            docs.dedup();
            Some(docs)
        })
        .collect();
    if lists.is_empty() {
        return (0..index.doc_count() as u32).collect();
    }
    lists.sort_by_key(Vec::len);
    let mut acc = lists.swap_remove(0);
    for other in &lists {
        acc = intersect(&acc, other);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Mean over query terms of the best cosine similarity to any document
/// term, each maximum clamped to `[0, 1]`. Zero when the document has no
/// terms.
pub fn term_similarity<'a, D>(query_terms: &[Vec<f32>], doc_terms: D) -> f64
where
    D: IntoIterator<Item = &'a [f32]>,
    D::IntoIter: Clone,
{
    if query_terms.is_empty() {
        return 0.0;
    }
    let docs = doc_terms.into_iter();
    if docs.clone().next().is_none() {
        return 0.0;
    }
    let total: f64 = query_terms
        .iter()
        .map(|q| {
            docs.clone()
                .map(|d| cosine(q, d))
                .fold(f64::NEG_INFINITY, f64::max)
                .clamp(0.0, 1.0)
        })
        .sum();
    total / query_terms.len() as f64
}

/// [`term_similarity`] over term strings.
pub fn term_similarity_for<S: AsRef<str>, T: AsRef<str>>(
    query_terms: &[S],
    doc_terms: &[T],
    provider: &dyn EmbeddingProvider,
) -> f64 {
    let q: Vec<Vec<f32>> = query_terms.iter().map(|t| provider.embed(t.as_ref())).collect();
    let d: Vec<Vec<f32>> = doc_terms.iter().map(|t| provider.embed(t.as_ref())).collect();
    term_similarity(&q, d.iter().map(Vec::as_slice))
}

/// `2ab / (a + b)`, zero when `a + b` is zero.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Ranks candidates. Without semantic terms the candidates are ordered by
/// timestamp, newest first. Otherwise the `K` candidates most similar to the
/// query vector are scored by the harmonic mean of document similarity
/// (clamped at 0) and term similarity.
pub fn rank(
    query: &Query,
    candidates: &[u32],
    searcher: &Searcher,
    config: &SearchConfig,
) -> Vec<SearchResult> {
    let index = searcher.index();
    let mut results: Vec<SearchResult> = if query.semantic_terms.is_empty() {
        let mut ords = candidates.to_vec();
        ords.sort_by(|&a, &b| result_order(index, (0.0, a), (0.0, b)));
        ords.truncate(config.page_size);
        ords.into_iter()
            .map(|o| SearchResult {
                record_id: index.record(o).id.clone(),
                ordinal: o,
                timestamp: index.timestamp(o),
                doc_sim: 0.0,
                term_sim: 0.0,
                score: 0.0,
                rank: 0,
            })
            .collect()
    } else {
        let mut sims: Vec<(f64, u32)> = candidates
            .iter()
            .map(|&o| (cosine(&query.vector, index.doc_vector(o)), o))
            .collect();
        sims.sort_by(|&a, &b| result_order(index, a, b));
        sims.truncate(config.k);
        let qvecs: Vec<Vec<f32>> = query
            .semantic_terms
            .iter()
            .map(|t| searcher.term_vector(t))
            .collect();
        let mut scored: Vec<SearchResult> = sims
            .into_iter()
            .map(|(doc_sim, o)| {
                let term_sim = term_similarity(&qvecs, searcher.doc_term_vectors(o));
                SearchResult {
                    record_id: index.record(o).id.clone(),
                    ordinal: o,
                    timestamp: index.timestamp(o),
                    doc_sim,
                    term_sim,
                    score: harmonic_mean(doc_sim.max(0.0), term_sim),
                    rank: 0,
                }
            })
            .collect();
        scored.sort_by(|a, b| result_order(index, (a.score, a.ordinal), (b.score, b.ordinal)));
        scored.truncate(config.page_size);
        scored
    };
    assign_ranks(&mut results);
    results
}
