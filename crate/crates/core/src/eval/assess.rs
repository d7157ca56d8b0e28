use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{EvalError, FeedbackEvent, Level, QrelSet};

/// Assessor id to the query ids assigned to them, in assignment order.
pub type Assignment = BTreeMap<String, Vec<String>>;

/// Round-robin distribution of queries over assessors so every query is
/// judged by `redundancy` distinct assessors and nobody gets more than
/// `per_assessor` queries.
pub fn assign_queries(
    query_ids: &[String],
    assessor_ids: &[String],
    per_assessor: usize,
    redundancy: usize,
) -> Result<Assignment, EvalError> {
    let required = query_ids.len() * redundancy;
    let available = assessor_ids.len() * per_assessor;
    if required > available {
        return Err(EvalError::InfeasibleAssignment {
            required,
            available,
        });
    }
    if redundancy > assessor_ids.len() {
        return Err(EvalError::InvalidArgument(format!(
            "redundancy {redundancy} exceeds the number of assessors ({})",
            assessor_ids.len()
        )));
    }
    let distinct: BTreeSet<&String> = assessor_ids.iter().collect();
    if distinct.len() != assessor_ids.len() {
        return Err(EvalError::InvalidArgument("assessor ids must be unique".into()));
    }

    let mut loads: Vec<Vec<String>> = vec![Vec::new(); assessor_ids.len()];
    let mut cursor = 0usize;
    for _ in 0..redundancy {
        for q in query_ids {
            let pick = (0..assessor_ids.len())
                .map(|off| (cursor + off) % assessor_ids.len())
                .find(|&a| loads[a].len() < per_assessor && !loads[a].contains(q))
                .ok_or_else(|| {
                    EvalError::InvalidArgument(format!(
                        "round-robin could not place query {q:?}; increase per-assessor capacity"
                    ))
                })?;
            loads[pick].push(q.clone());
            cursor = (pick + 1) % assessor_ids.len();
        }
    }
    Ok(assessor_ids.iter().cloned().zip(loads).collect())
}

/// Latest vote per (assessor, query, record, level). Equal timestamps
/// resolve towards `relevant = true` so the result does not depend on event
/// order. Output is sorted by key.
pub fn effective_events(events: &[FeedbackEvent]) -> Vec<FeedbackEvent> {
    let mut latest: BTreeMap<(&str, &str, &str, Level), &FeedbackEvent> = BTreeMap::new();
    for e in events {
        latest
            .entry(e.key())
            .and_modify(|cur| {
                if (e.timestamp, e.relevant) > (cur.timestamp, cur.relevant) {
                    *cur = e;
                }
            })
            .or_insert(e);
    }
    latest.into_values().cloned().collect()
}

/// Graded qrels: each (assessor, level) pair voting relevant adds one to
/// the grade. Judged but never relevant documents get grade 0.
pub fn fuse_votes(events: &[FeedbackEvent]) -> QrelSet {
    let mut qrels = QrelSet::new();
    let mut grades: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    let effective = effective_events(events);
    for e in &effective {
        *grades.entry((&e.query_id, &e.record_id)).or_insert(0) += u32::from(e.relevant);
    }
    for ((q, d), g) in grades {
        qrels.insert(q, d, g);
    }
    qrels
}

/// Cohen's kappa for two aligned binary label lists.
pub fn cohens_kappa(labels_a: &[bool], labels_b: &[bool]) -> Result<f64, EvalError> {
    if labels_a.len() != labels_b.len() {
        return Err(EvalError::LengthMismatch(labels_a.len(), labels_b.len()));
    }
    if labels_a.is_empty() {
        return Err(EvalError::EmptyLabels);
    }
    let n = labels_a.len() as f64;
    let agree = labels_a.iter().zip(labels_b).filter(|(a, b)| a == b).count() as f64;
    let p_o = agree / n;
    let yes_a = labels_a.iter().filter(|&&x| x).count() as f64 / n;
    let yes_b = labels_b.iter().filter(|&&x| x).count() as f64 / n;
    let p_e = yes_a * yes_b + (1.0 - yes_a) * (1.0 - yes_b);
    if p_e >= 1.0 {
        return Ok(if p_o >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Aligned label pairs for one level: every unordered pair of assessors who
/// both judged the same (query, record) contributes one pair.
pub fn pairwise_labels(events: &[FeedbackEvent], level: Level) -> (Vec<bool>, Vec<bool>) {
    let mut items: BTreeMap<(String, String), Vec<(String, bool)>> = BTreeMap::new();
    for e in effective_events(events).into_iter().filter(|e| e.level == level) {
        items
            .entry((e.query_id, e.record_id))
            .or_default()
            .push((e.assessor_id, e.relevant));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for votes in items.values() {
        for i in 0..votes.len() {
            for j in i + 1..votes.len() {
                a.push(votes[i].1);
                b.push(votes[j].1);
            }
        }
    }
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaSummary {
    pub level: Level,
    /// Queries judged by at least two assessors on this level.
    pub queries: usize,
    pub pairs: usize,
    pub kappa: Option<f64>,
}

/// Pooled pairwise kappa per judgment level.
pub fn kappa_by_level(events: &[FeedbackEvent]) -> Vec<KappaSummary> {
    Level::BOTH
        .iter()
        .map(|&level| {
            let mut assessors: HashMap<&str, BTreeSet<&str>> = HashMap::new();
            for e in events.iter().filter(|e| e.level == level) {
                assessors.entry(&e.query_id).or_default().insert(&e.assessor_id);
            }
            let queries = assessors.values().filter(|s| s.len() >= 2).count();
            let (a, b) = pairwise_labels(events, level);
            KappaSummary {
                level,
                queries,
                pairs: a.len(),
                kappa: cohens_kappa(&a, &b).ok(),
            }
        })
        .collect()
}
