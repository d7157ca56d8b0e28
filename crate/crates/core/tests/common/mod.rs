#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftsearch::corpus::{generate_synthetic_corpus, SyntheticBenchmark};
use shiftsearch::embedding::cosine;
use shiftsearch::eval::{QrelSet, RunEntry, RunFile};
use shiftsearch::preprocess::{expand_record, normalize, tokenize};
use shiftsearch::search::Query;
use shiftsearch::{
    build_index, Dictionary, EmbeddingProvider, Field, FunctionalLocationEntry, HashedProvider, Index, IndexConfig,
    NormalizationConfig, Record, Searcher, TokenKind,
};

pub const WORDS: &[&str] = &[
    "Pumpe", "Pumpen", "Leckage", "Ventil", "Ventile", "Dichtung", "defekt", "getauscht", "Temperatur",
    "Temp", "Druck", "Druckabfall", "Motor", "Lager", "Lagerschaden", "Reaktor", "prüfen", "und", "der",
    "am", "Schicht", "Geräusch", "Vibration",
];
pub const CODES: &[&str] = &["P5002", "R105.12", "V-201", "K3", "M12.4"];
pub const NUMBERS: &[&str] = &["85", "3.5", "120", "2019"];

pub fn small_dictionary() -> Dictionary {
    Dictionary::new(vec![
        FunctionalLocationEntry::new("PLANT1-R105.12", "R105.12", "Reaktor"),
        FunctionalLocationEntry::new("PLANT1-P5002", "P5002", "Kühlpumpe"),
        FunctionalLocationEntry::new("PLANT1-K3", "K3", "Kessel"),
    ])
}

pub fn lemmas() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("Pumpen".to_string(), "Pumpe".to_string()),
        ("Ventile".to_string(), "Ventil".to_string()),
    ])
}

fn random_text(rng: &mut ChaCha8Rng, max_tokens: usize) -> String {
    let n = rng.random_range(0..=max_tokens);
    (0..n)
        .map(|_| match rng.random_range(0..10) {
            0 => *CODES.choose(rng).unwrap(),
            1 => *NUMBERS.choose(rng).unwrap(),
            _ => *WORDS.choose(rng).unwrap(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Small collection with many repeated words, few distinct timestamps and
/// some duplicate texts, so score and timestamp ties are common.
pub fn random_corpus(seed: u64, max_docs: usize) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_docs);
    let mut records: Vec<Record> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.random_bool(0.1) {
            let mut copy = records[rng.random_range(0..i)].clone();
            copy.id = format!("d{i:03}");
            records.push(copy);
            continue;
        }
        let attributes = if rng.random_bool(0.3) {
            vec![["PLANT1-R105.12", "PLANT1-P5002", "PLANT1-K3"].choose(&mut rng).unwrap().to_string()]
        } else {
            Vec::new()
        };
        records.push(Record {
            id: format!("d{i:03}"),
            timestamp: rng.random_range(0..5) * 1000,
            attributes,
            title: random_text(&mut rng, 3),
            body: vec![Field::new("text", random_text(&mut rng, 8))],
        });
    }
    records
}

pub fn random_queries(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n)
        .map(|_| {
            let mut q = random_text(&mut rng, 3);
            if rng.random_bool(0.15) {
                q.push_str(&format!(" \"{}\"", WORDS.choose(&mut rng).unwrap()));
            }
            if q.trim().is_empty() {
                q = WORDS.choose(&mut rng).unwrap().to_string();
            }
            q
        })
        .collect()
}

pub fn searcher_for(records: &[Record], dictionary: &Dictionary, normalization: NormalizationConfig, seed: u64, dim: usize) -> Searcher {
    let provider = Arc::new(HashedProvider::new(seed, dim).unwrap());
    let index = build_index(records, dictionary, provider.as_ref(), &IndexConfig::new(normalization)).unwrap();
    Searcher::new(Arc::new(index), provider).unwrap()
}

pub fn bench_searcher(seed: u64, n_records: usize, n_locations: usize) -> (SyntheticBenchmark, Searcher) {
    let bench = generate_synthetic_corpus(seed, n_records, n_locations).unwrap();
    let searcher = searcher_for(&bench.records, &bench.dictionary(), bench.normalization(), seed, 256);
    (bench, searcher)
}

/// One brute-force scored document.
#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub id: String,
    pub timestamp: i64,
    pub doc_sim: f64,
    pub term_sim: f64,
    pub score: f64,
}

fn newer_then_id(a: &Scored, b: &Scored) -> std::cmp::Ordering {
    b.timestamp.cmp(&a.timestamp).then_with(|| a.id.cmp(&b.id))
}

/// Exhaustive reference scorer. Re-derives every document's terms from its
/// raw text, tests each document against every exact-match term, scores
/// every candidate, and only then applies the K cut and the page size.
pub fn brute_force_rank(
    index: &Index,
    provider: &dyn EmbeddingProvider,
    query: &Query,
    k: usize,
    page_size: usize,
) -> Vec<Scored> {
    let analyzed: Vec<(BTreeSet<String>, BTreeSet<String>)> = index
        .records()
        .iter()
        .map(|r| {
            let text = expand_record(r, index.dictionary()).text();
            let tokens = normalize(tokenize(&text), index.normalization());
            let folded = tokens.iter().map(|t| t.normalized.to_lowercase()).collect();
            let terms = tokens
                .iter()
                .filter(|t| t.kind != TokenKind::Numeric)
                .map(|t| t.normalized.clone())
                .collect();
            (folded, terms)
        })
        .collect();

    let live: Vec<&String> = query
        .exact_terms
        .iter()
        .filter(|t| analyzed.iter().any(|(folded, _)| folded.contains(t.as_str())))
        .collect();
    let candidates: Vec<usize> = (0..analyzed.len())
        .filter(|&i| live.iter().all(|t| analyzed[i].0.contains(t.as_str())))
        .collect();

    let mut scored: Vec<Scored> = candidates
        .iter()
        .map(|&i| {
            let r = &index.records()[i];
            if query.semantic_terms.is_empty() {
                return Scored {
                    id: r.id.clone(),
                    timestamp: r.timestamp,
                    doc_sim: 0.0,
                    term_sim: 0.0,
                    score: 0.0,
                };
            }
            let doc_sim = cosine(&query.vector, index.doc_vector(i as u32));
            let terms = &analyzed[i].1;
            let term_sim = if terms.is_empty() {
                0.0
            } else {
                let mut total = 0.0;
                for q in &query.semantic_terms {
                    let qv = provider.embed(q);
                    let mut best = f64::NEG_INFINITY;
                    for d in terms {
                        best = best.max(cosine(&qv, &provider.embed(d)));
                    }
                    total += best.clamp(0.0, 1.0);
                }
                total / query.semantic_terms.len() as f64
            };
            let a = doc_sim.max(0.0);
            let score = if a + term_sim == 0.0 {
                0.0
            } else {
                2.0 * a * term_sim / (a + term_sim)
            };
            Scored {
                id: r.id.clone(),
                timestamp: r.timestamp,
                doc_sim,
                term_sim,
                score,
            }
        })
        .collect();

    if query.semantic_terms.is_empty() {
        scored.sort_by(newer_then_id);
    } else {
        scored.sort_by(|a, b| b.doc_sim.total_cmp(&a.doc_sim).then_with(|| newer_then_id(a, b)));
        scored.truncate(k);
        scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| newer_then_id(a, b)));
    }
    scored.truncate(page_size);
    scored
}

/// Reference metrics for one ranked list, written from the textbook
/// definitions: (P@n, AP@n, RR, nDCG@n).
pub fn reference_metrics(ranked: &[&str], grades: &BTreeMap<String, u32>, n: usize) -> (f64, f64, f64, f64) {
    let rel = |id: &str| grades.get(id).copied().unwrap_or(0);
    let top: Vec<u32> = (0..n).map(|i| ranked.get(i).map_or(0, |id| rel(id))).collect();

    let p = top.iter().filter(|&&g| g >= 1).count() as f64 / n as f64;

    let total_rel = grades.values().filter(|&&g| g >= 1).count();
    let mut ap = 0.0;
    for i in 1..=n {
        if top[i - 1] >= 1 {
            let p_at_i = top[..i].iter().filter(|&&g| g >= 1).count() as f64 / i as f64;
            ap += p_at_i;
        }
    }
    let denom = n.min(total_rel);
    let ap = if denom == 0 { 0.0 } else { ap / denom as f64 };

    let rr = ranked
        .iter()
        .enumerate()
        .find(|(_, id)| rel(id) >= 1)
        .map_or(0.0, |(i, _)| 1.0 / (i as f64 + 1.0));

    let dcg = |gs: &[u32]| -> f64 {
        gs.iter()
            .enumerate()
            .map(|(i, &g)| g as f64 / ((i + 1) as f64 + 1.0).log2())
            .sum()
    };
    let mut ideal: Vec<u32> = grades.values().copied().collect();
    ideal.sort_by(|a, b| b.cmp(a));
    ideal.truncate(n);
    let idcg = dcg(&ideal);
    let ndcg = if idcg == 0.0 { 0.0 } else { dcg(&top) / idcg };
    (p, ap, rr, ndcg)
}

/// A random run and qrels pair over a handful of queries.
pub fn random_run_and_qrels(seed: u64) -> (RunFile, QrelSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = RunFile::new("rand");
    let mut qrels = QrelSet::new();
    let n_queries = rng.random_range(1..=6);
    for q in 0..n_queries {
        let qid = format!("q{q}");
        let pool: Vec<String> = (0..rng.random_range(1..=30)).map(|d| format!("d{d}")).collect();
        let len = rng.random_range(0..=pool.len());
        let mut ranked = pool.clone();
        for i in (1..ranked.len()).rev() {
            ranked.swap(i, rng.random_range(0..=i));
        }
        ranked.truncate(len);
        let entries = ranked
            .iter()
            .enumerate()
            .map(|(i, d)| RunEntry {
                record_id: d.clone(),
                score: 100.0 - i as f64,
            })
            .collect();
        run.insert(qid.clone(), entries).unwrap();
        if rng.random_bool(0.9) {
            for d in &pool {
                if rng.random_bool(0.6) {
                    qrels.insert(qid.clone(), d.clone(), rng.random_range(0..=4));
                }
            }
        }
    }
    (run, qrels)
}

/// A saved synthetic index plus a service configuration pointing at it.
pub struct ServiceFixture {
    pub dir: tempfile::TempDir,
    pub bench: SyntheticBenchmark,
    pub config: shiftsearch::service::ServiceConfig,
}

pub fn service_fixture(with_plan: bool) -> ServiceFixture {
    use shiftsearch::service::{AssessmentPlan, ServiceConfig};

    let (bench, searcher) = bench_searcher(7, 150, 10);
    let dir = tempfile::tempdir().unwrap();
    let index_dir = dir.path().join("index");
    shiftsearch::save_index(searcher.index(), &index_dir).unwrap();
    let mut config = ServiceConfig::new(&index_dir);
    config.feedback_log = dir.path().join("feedback/feedback.jsonl");
    if with_plan {
        let assessors = vec!["assessor-a".to_string(), "assessor-b".to_string()];
        let queries: Vec<(String, String)> = bench.queries.iter().take(4).cloned().collect();
        let plan = AssessmentPlan::build("plan-1", &searcher, &queries, &assessors, 4, 2).unwrap();
        let path = dir.path().join("plan.json");
        plan.save(&path).unwrap();
        config.plan = Some(path);
    }
    ServiceFixture { dir, bench, config }
}

/// Sends one request through the router without a network socket.
pub async fn call(
    router: axum::Router,
    method: &str,
    uri: &str,
    body: Option<serde_json::Value>,
) -> (axum::http::StatusCode, Vec<u8>) {
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    let mut req = axum::http::Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            axum::body::Body::from(serde_json::to_vec(&v).unwrap())
        }
        None => axum::body::Body::empty(),
    };
    let resp = router.oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(bytes)))
}

/// Percent-encodes a query-string value.
pub fn encode(s: &str) -> String {
    s.bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => (b as char).to_string(),
            _ => format!("%{b:02X}"),
        })
        .collect()
}
