use serde::{Deserialize, Serialize};

use super::{EvalError, QrelSet, RunFile};

/// Fraction of the first `n` positions holding a relevant (grade >= 1)
/// document. Missing positions count as non-relevant.
pub fn precision_at(grades: &[u32], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    grades.iter().take(n).filter(|&&g| g > 0).count() as f64 / n as f64
}

/// Average precision over the first `n` positions, normalized by
/// `min(n, total_relevant)`.
pub fn average_precision_at(grades: &[u32], n: usize, total_relevant: usize) -> f64 {
    let denom = n.min(total_relevant);
    if denom == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &g) in grades.iter().take(n).enumerate() {
        if g > 0 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / denom as f64
}

/// Reciprocal rank of the first relevant document, 0 if there is none.
pub fn reciprocal_rank(grades: &[u32]) -> f64 {
    grades
        .iter()
        .position(|&g| g > 0)
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

fn dcg(grades: impl Iterator<Item = u32>) -> f64 {
    grades
        .enumerate()
        .map(|(i, g)| f64::from(g) / ((i + 2) as f64).log2())
        .sum()
}

/// nDCG at `n` with linear gain. `judged` holds every grade known for the
/// query; the ideal ranking sorts them in decreasing order.
pub fn ndcg_at(grades: &[u32], judged: &[u32], n: usize) -> f64 {
    let mut ideal = judged.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(ideal.into_iter().take(n));
    if idcg == 0.0 {
        return 0.0;
    }
    dcg(grades.iter().copied().take(n)) / idcg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffMetrics {
    pub n: usize,
    pub precision: f64,
    pub map: f64,
    pub ndcg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub run_tag: String,
    pub query_count: usize,
    /// Run queries without any qrels entry; they score zero.
    pub queries_without_qrels: usize,
    pub avg_retrieved: f64,
    pub mrr: f64,
    pub cutoffs: Vec<CutoffMetrics>,
}

impl MetricReport {
    pub fn at(&self, n: usize) -> Option<&CutoffMetrics> {
        self.cutoffs.iter().find(|c| c.n == n)
    }
}

/// Macro-averaged metrics over the queries of `run`, in sorted query order.
pub fn evaluate_run(run: &RunFile, qrels: &QrelSet, cutoffs: &[usize]) -> Result<MetricReport, EvalError> {
    if run.queries.is_empty() {
        return Err(EvalError::EmptyRun);
    }
    if cutoffs.is_empty() || cutoffs.contains(&0) {
        return Err(EvalError::InvalidArgument(
            "cutoffs must be a non-empty list of positive integers".into(),
        ));
    }
    let mut mrr = 0.0;
    let mut retrieved = 0usize;
    let mut missing = 0usize;
    let mut sums = vec![(0.0, 0.0, 0.0); cutoffs.len()];
    for (qid, entries) in &run.queries {
        let judged: Vec<u32> = match qrels.query(qid) {
            Some(q) => q.values().copied().collect(),
            None => {
                missing += 1;
                Vec::new()
            }
        };
        let total_relevant = judged.iter().filter(|&&g| g > 0).count();
        let grades: Vec<u32> = entries
            .iter()
            .map(|e| qrels.grade(qid, &e.record_id))
            .collect();
        retrieved += entries.len();
        mrr += reciprocal_rank(&grades);
        for (sum, &n) in sums.iter_mut().zip(cutoffs) {
            sum.0 += precision_at(&grades, n);
            sum.1 += average_precision_at(&grades, n, total_relevant);
            sum.2 += ndcg_at(&grades, &judged, n);
        }
    }
    let q = run.queries.len() as f64;
    Ok(MetricReport {
        run_tag: run.tag.clone(),
        query_count: run.queries.len(),
        queries_without_qrels: missing,
        avg_retrieved: retrieved as f64 / q,
        mrr: mrr / q,
        cutoffs: cutoffs
            .iter()
            .zip(sums)
            .map(|(&n, (p, m, d))| CutoffMetrics {
                n,
                precision: p / q,
                map: m / q,
                ndcg: d / q,
            })
            .collect(),
    })
}
