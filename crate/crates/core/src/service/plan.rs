use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::eval::{assign_queries, Assignment};
use crate::search::{Method, SearchConfig, Searcher};

/// Depth of the frozen result lists assessors judge.
pub const PLAN_DEPTH: usize = 20;

/// Query assignment plus the result lists frozen when the plan was created,
/// so every assessor of a query judges the same rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentPlan {
    pub plan_id: String,
    pub assignments: Assignment,
    pub queries: BTreeMap<String, String>,
    /// Query id to method to record ids, best first.
    pub frozen: BTreeMap<String, BTreeMap<Method, Vec<String>>>,
}

impl AssessmentPlan {
    /// Assigns `queries` round-robin and freezes the top [`PLAN_DEPTH`]
    /// results of every method (context expansion on).
    pub fn build(
        plan_id: &str,
        searcher: &Searcher,
        queries: &[(String, String)],
        assessors: &[String],
        per_assessor: usize,
        redundancy: usize,
    ) -> Result<Self, ServiceError> {
        let ids: Vec<String> = queries.iter().map(|(id, _)| id.clone()).collect();
        let assignments = assign_queries(&ids, assessors, per_assessor, redundancy)?;
        let mut frozen = BTreeMap::new();
        for (qid, text) in queries {
            let mut per_method = BTreeMap::new();
            for method in Method::ALL {
                let config = SearchConfig::default()
                    .with_method(method)
                    .with_page_size(PLAN_DEPTH);
                let run = searcher.run(&[(qid.clone(), text.clone())], &config, method.as_str())?;
                let list = run.queries[qid].iter().map(|e| e.record_id.clone()).collect();
                per_method.insert(method, list);
            }
            frozen.insert(qid.clone(), per_method);
        }
        Ok(Self {
            plan_id: plan_id.to_string(),
            assignments,
            queries: queries.iter().cloned().collect(),
            frozen,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = fs::read_to_string(path).map_err(|source| ServiceError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| ServiceError::Plan(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), ServiceError> {
        let text = serde_json::to_string_pretty(self).expect("plan serializes");
        fs::write(path, text + "\n").map_err(|source| ServiceError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.queries.contains_key(query_id)
    }

    /// Frozen lists of all methods interleaved rank by rank, duplicates
    /// removed, so assessors cannot tell which system found a record.
    pub fn pool(&self, query_id: &str) -> Vec<String> {
        let Some(lists) = self.frozen.get(query_id) else {
            return Vec::new();
        };
        let depth = lists.values().map(Vec::len).max().unwrap_or(0);
        let mut out: Vec<String> = Vec::new();
        for i in 0..depth {
            for list in lists.values() {
                if let Some(id) = list.get(i) {
                    if !out.contains(id) {
                        out.push(id.clone());
                    }
                }
            }
        }
        out
    }
}
