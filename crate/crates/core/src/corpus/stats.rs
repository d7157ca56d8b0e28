use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Record};
use crate::preprocess::{tokenize, TokenKind};

/// Fraction of tokens of each kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenKindShares {
    pub word: f64,
    pub code: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub record_count: usize,
    pub bucket_width: usize,
    /// Bucket start (in characters) to number of records.
    pub length_histogram: BTreeMap<usize, usize>,
    pub token_count: usize,
    pub token_kind_shares: TokenKindShares,
}

/// Length histogram over title plus body characters and token-kind
/// composition of the whole collection.
pub fn corpus_stats(records: &[Record], bucket_width: usize) -> Result<CorpusStats, CorpusError> {
    if bucket_width == 0 {
        return Err(CorpusError::InvalidArgument(
            "bucket width must be at least 1".into(),
        ));
    }
    let mut histogram = BTreeMap::new();
    let mut counts = [0usize; 3];
    for r in records {
        let bucket = r.char_len() / bucket_width * bucket_width;
        *histogram.entry(bucket).or_insert(0) += 1;
        for part in std::iter::once(&r.title).chain(r.body.iter().map(|f| &f.text)) {
            for t in tokenize(part) {
                counts[match t.kind {
                    TokenKind::Word => 0,
                    TokenKind::Code => 1,
                    TokenKind::Numeric => 2,
                }] += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    let shares = if total == 0 {
        TokenKindShares::default()
    } else {
        let t = total as f64;
        TokenKindShares {
            word: counts[0] as f64 / t,
            code: counts[1] as f64 / t,
            numeric: counts[2] as f64 / t,
        }
    };
    Ok(CorpusStats {
        record_count: records.len(),
        bucket_width,
        length_histogram: histogram,
        token_count: total,
        token_kind_shares: shares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Field;

    fn rec(id: &str, text: &str) -> Record {
        Record {
            id: id.into(),
            timestamp: 0,
            attributes: vec![],
            title: String::new(),
            body: vec![Field::new("text", text)],
        }
    }

    #[test]
    fn histogram_buckets() {
        let recs = [rec("a", &"x".repeat(10)), rec("b", &"y".repeat(150))];
        let s = corpus_stats(&recs, 100).unwrap();
        assert_eq!(s.record_count, 2);
        assert_eq!(s.length_histogram, BTreeMap::from([(0, 1), (100, 1)]));
    }

    #[test]
    fn token_kind_shares() {
        let s = corpus_stats(&[rec("a", "P5002 defekt")], 10).unwrap();
        assert_eq!(s.token_kind_shares.code, 0.5);
        assert_eq!(s.token_kind_shares.word, 0.5);
        assert_eq!(s.token_kind_shares.numeric, 0.0);
    }

    #[test]
    fn empty_collection() {
        let s = corpus_stats(&[], 50).unwrap();
        assert_eq!(s.record_count, 0);
        assert!(s.length_histogram.is_empty());
        assert!(corpus_stats(&[], 0).is_err());
    }
}
