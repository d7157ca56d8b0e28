//! Relevance assessment and retrieval evaluation.
//!
//! Assessors judge results on two levels (term and phrase match). Their
//! votes are summed into graded qrels, agreement is measured with Cohen's
//! kappa, and runs are scored with MRR, P@N, mAP@N and nDCG@N.

mod assess;
mod metrics;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use assess::{
    assign_queries, cohens_kappa, effective_events, fuse_votes, kappa_by_level, pairwise_labels,
    Assignment, KappaSummary,
};
pub use metrics::{
    average_precision_at, evaluate_run, ndcg_at, precision_at, reciprocal_rank, CutoffMetrics,
    MetricReport,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("label lists are empty")]
    EmptyLabels,
    #[error("infeasible assignment: need {required} assessor slots, have {available}")]
    InfeasibleAssignment { required: usize, available: usize },
    #[error("empty run")]
    EmptyRun,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Judgment level of a relevance vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// All query terms or their synonyms occur anywhere in the record.
    Term,
    /// The query's meaning occurs in close proximity.
    Phrase,
}

impl Level {
    pub const BOTH: [Level; 2] = [Level::Term, Level::Phrase];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Term => "term",
            Level::Phrase => "phrase",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "term" => Ok(Level::Term),
            "phrase" => Ok(Level::Phrase),
            other => Err(EvalError::InvalidArgument(format!(
                "unknown level {other:?} (expected term or phrase)"
            ))),
        }
    }
}

/// One relevance vote.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub assessor_id: String,
    pub query_id: String,
    pub record_id: String,
    pub level: Level,
    pub relevant: bool,
    /// Epoch milliseconds; the latest vote per key wins.
    pub timestamp: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan_id: Option<String>,
}

impl FeedbackEvent {
    pub fn key(&self) -> (&str, &str, &str, Level) {
        (&self.assessor_id, &self.query_id, &self.record_id, self.level)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a JSON-lines feedback log. A truncated final line (from an
/// interrupted write) is ignored; malformed lines elsewhere are errors.
pub fn read_feedback_log<R: Read>(reader: R) -> Result<Vec<FeedbackEvent>, EvalError> {
    let lines: Vec<String> = BufReader::new(reader)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| EvalError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<FeedbackEvent>(line) {
            Ok(e) => out.push(e),
            Err(_) if Some(i) == last => break,
            Err(e) => {
                return Err(EvalError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

pub fn load_feedback_log(path: &Path) -> Result<Vec<FeedbackEvent>, EvalError> {
    read_feedback_log(fs::File::open(path).map_err(io_err(path))?)
}

pub fn format_feedback_log(events: &[FeedbackEvent]) -> String {
    events
        .iter()
        .map(|e| format!("{}\n", serde_json::to_string(e).expect("event serializes")))
        .collect()
}

/// Graded relevance judgments: query id to record id to grade.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrelSet {
    grades: BTreeMap<String, BTreeMap<String, u32>>,
}

impl QrelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: impl Into<String>, record_id: impl Into<String>, grade: u32) {
        self.grades
            .entry(query_id.into())
            .or_default()
            .insert(record_id.into(), grade);
    }

    pub fn grade(&self, query_id: &str, record_id: &str) -> u32 {
        self.grades
            .get(query_id)
            .and_then(|q| q.get(record_id))
            .copied()
            .unwrap_or(0)
    }

    pub fn query(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.grades.get(query_id)
    }

    pub fn queries(&self) -> impl Iterator<Item = (&String, &BTreeMap<String, u32>)> {
        self.grades.iter()
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.grades.contains_key(query_id)
    }

    pub fn len(&self) -> usize {
        self.grades.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `query_id 0 record_id grade` lines.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut out = Self::new();
        for (i, line) in text.lines().enumerate() {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.is_empty() {
                continue;
            }
            let [q, _, d, g] = cols[..] else {
                return Err(EvalError::Parse {
                    line: i + 1,
                    message: format!("expected 4 columns, found {}", cols.len()),
                });
            };
            let grade = g.parse::<u32>().map_err(|e| EvalError::Parse {
                line: i + 1,
                message: format!("bad grade {g:?}: {e}"),
            })?;
            out.insert(q, d, grade);
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        for (q, docs) in &self.grades {
            for (d, g) in docs {
                s.push_str(&format!("{q} 0 {d} {g}\n"));
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub record_id: String,
    pub score: f64,
}

/// Ranked results per query for one system configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub tag: String,
    pub queries: BTreeMap<String, Vec<RunEntry>>,
}

impl RunFile {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            queries: BTreeMap::new(),
        }
    }

    /// Adds a ranked list. Scores must not increase down the list.
    pub fn insert(&mut self, query_id: impl Into<String>, entries: Vec<RunEntry>) -> Result<(), EvalError> {
        let query_id = query_id.into();
        if entries.windows(2).any(|w| w[1].score > w[0].score) {
            return Err(EvalError::InvalidArgument(format!(
                "scores for query {query_id:?} increase down the ranking"
            )));
        }
        self.queries.insert(query_id, entries);
        Ok(())
    }

    /// `query_id Q0 record_id rank score tag` lines. Ranks per query must be
    /// consecutive from 1 once sorted.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut tag: Option<String> = None;
        let mut rows: BTreeMap<String, Vec<(usize, usize, RunEntry)>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.is_empty() {
                continue;
            }
            let perr = |message: String| EvalError::Parse {
                line: i + 1,
                message,
            };
            let [q, _, d, r, s, t] = cols[..] else {
                return Err(perr(format!("expected 6 columns, found {}", cols.len())));
            };
            let rank = r.parse::<usize>().map_err(|e| perr(format!("bad rank {r:?}: {e}")))?;
            let score = s.parse::<f64>().map_err(|e| perr(format!("bad score {s:?}: {e}")))?;
            if !score.is_finite() {
                return Err(perr(format!("non-finite score {s:?}")));
            }
            tag.get_or_insert_with(|| t.to_string());
            rows.entry(q.to_string()).or_default().push((
                rank,
                i + 1,
                RunEntry {
                    record_id: d.to_string(),
                    score,
                },
            ));
        }
        let mut run = RunFile::new(tag.unwrap_or_default());
        for (q, mut list) in rows {
            list.sort_by_key(|&(rank, _, _)| rank);
            for (pos, (rank, line, _)) in list.iter().enumerate() {
                if *rank != pos + 1 {
                    return Err(EvalError::Parse {
                        line: *line,
                        message: format!("ranks for query {q:?} are not consecutive from 1"),
                    });
                }
            }
            run.insert(q, list.into_iter().map(|(_, _, e)| e).collect())?;
        }
        Ok(run)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        for (q, entries) in &self.queries {
            for (i, e) in entries.iter().enumerate() {
                s.push_str(&format!("{q} Q0 {} {} {} {}\n", e.record_id, i + 1, e.score, self.tag));
            }
        }
        s
    }
}

/// Parses `query_id<TAB>query_text` lines. Blank lines and lines starting
/// with `#` are skipped; query ids must be unique.
pub fn parse_queries(text: &str) -> Result<Vec<(String, String)>, EvalError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| EvalError::Parse {
            line: i + 1,
            message,
        };
        let (id, query) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected query_id<TAB>query_text".into()))?;
        let id = id.trim();
        if id.is_empty() {
            return Err(parse_err("empty query id".into()));
        }
        if out.iter().any(|(q, _)| q == id) {
            return Err(parse_err(format!("duplicate query id {id:?}")));
        }
        out.push((id.to_string(), query.trim().to_string()));
    }
    Ok(out)
}

pub fn load_queries(path: &Path) -> Result<Vec<(String, String)>, EvalError> {
    parse_queries(&fs::read_to_string(path).map_err(io_err(path))?)
}

pub fn format_queries(queries: &[(String, String)]) -> String {
    queries.iter().map(|(id, text)| format!("{id}\t{text}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_file_round_trip() {
        let qs = vec![("q1".to_string(), "Leckage Pumpe".to_string()), ("q2".into(), "R105.12".into())];
        assert_eq!(parse_queries(&format_queries(&qs)).unwrap(), qs);
        assert!(parse_queries("q1 no tab\n").is_err());
        assert!(parse_queries("q1\ta\nq1\tb\n").is_err());
        assert_eq!(parse_queries("# header\n\nq\tx\n").unwrap().len(), 1);
    }

    #[test]
    fn qrels_text_format() {
        let q = QrelSet::parse("q1 0 d1 2\nq1 0 d2 0\n\nq2 0 d1 4\n").unwrap();
        assert_eq!(q.grade("q1", "d1"), 2);
        assert_eq!(q.grade("q2", "d1"), 4);
        assert_eq!(q.grade("q2", "zz"), 0);
        assert_eq!(QrelSet::parse(&q.format()).unwrap(), q);
        assert!(QrelSet::parse("q1 0 d1").is_err());
        assert!(QrelSet::parse("q1 0 d1 x").is_err());
    }

    #[test]
    fn run_text_format() {
        let text = "q1 Q0 d2 2 0.5 sem\nq1 Q0 d1 1 0.9 sem\nq2 Q0 d3 1 1 sem\n";
        let run = RunFile::parse(text).unwrap();
        assert_eq!(run.tag, "sem");
        assert_eq!(run.queries["q1"][0].record_id, "d1");
        assert_eq!(RunFile::parse(&run.format()).unwrap(), run);
        assert!(RunFile::parse("q1 Q0 d1 2 0.5 x\n").is_err());
        assert!(RunFile::parse("q1 Q0 d1 1 0.5 x\nq1 Q0 d2 2 0.9 x\n").is_err());
    }

    #[test]
    fn feedback_log_tolerates_torn_tail() {
        let e = FeedbackEvent {
            assessor_id: "a1".into(),
            query_id: "q7".into(),
            record_id: "r42".into(),
            level: Level::Term,
            relevant: true,
            timestamp: 1,
            plan_id: None,
        };
        let mut log = format_feedback_log(std::slice::from_ref(&e));
        log.push_str("{\"assessor_id\":\"a");
        assert_eq!(read_feedback_log(log.as_bytes()).unwrap(), vec![e.clone()]);
        let bad = format!("garbage\n{}", format_feedback_log(&[e]));
        assert!(read_feedback_log(bad.as_bytes()).is_err());
    }
}
