use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::token_spans;
use crate::corpus::{join_text, Dictionary, Field, FunctionalLocationEntry, Record};

/// What context expansion did to one record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    /// Attribute descriptions newly prepended to the title.
    pub attributes_expanded: usize,
    /// Attribute long IDs with no dictionary entry.
    pub unknown_attributes: Vec<String>,
    /// In-text ID mentions that received a description.
    pub mentions_expanded: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedRecord {
    pub title: String,
    pub body: Vec<Field>,
    pub report: ExpansionReport,
}

impl ExpandedRecord {
    pub fn text(&self) -> String {
        join_text(&self.title, &self.body)
    }
}

/// True when `phrase` (case-insensitive, whole words) ends right before
/// `byte_pos`, ignoring whitespace in between.
fn preceded_by(text: &str, byte_pos: usize, phrase: &str) -> bool {
    let before = text[..byte_pos].trim_end();
    let mut rest = before.chars().rev();
    for p in phrase.chars().rev().flat_map(char::to_lowercase) {
        match rest.next() {
            Some(c) if c.to_lowercase().eq(std::iter::once(p)) => {}
            _ => return false,
        }
    }
    !rest.next().is_some_and(char::is_alphanumeric)
}

fn annotation(entry: &FunctionalLocationEntry) -> String {
    format!("{} {}", entry.description, entry.short_id)
}

/// Inserts descriptions before in-text short IDs and "description short_id"
/// before literal long IDs. Mentions that already carry their description
/// are left alone, so the operation is idempotent. Returns the new text and
/// the number of insertions.
pub fn expand_text(text: &str, dictionary: &Dictionary) -> (String, usize) {
    if dictionary.is_empty() {
        return (text.to_string(), 0);
    }
    let mut out = String::with_capacity(text.len() + 32);
    let mut last = 0;
    let mut inserted = 0;
    for span in token_spans(text) {
        let token = &text[span.bytes.clone()];
        let insertion = if let Some(e) = dictionary.by_short_id(token) {
            (!preceded_by(text, span.bytes.start, &e.description)).then(|| e.description.clone())
        } else if let Some(e) = dictionary.by_long_id(token) {
            let phrase = annotation(e);
            (!preceded_by(text, span.bytes.start, &phrase)).then_some(phrase)
        } else {
            None
        };
        if let Some(ins) = insertion {
            out.push_str(&text[last..span.bytes.start]);
            out.push_str(&ins);
            out.push(' ');
            last = span.bytes.start;
            inserted += 1;
        }
    }
    out.push_str(&text[last..]);
    (out, inserted)
}

/// Query-side expansion; the same insertion rule as in-text record mentions.
pub fn expand_query_text(text: &str, dictionary: &Dictionary) -> String {
    expand_text(text, dictionary).0
}

fn has_annotation(text: &str, entry: &FunctionalLocationEntry) -> bool {
    token_spans(text).into_iter().any(|s| {
        text[s.bytes.clone()].to_lowercase() == entry.short_id.to_lowercase()
            && preceded_by(text, s.bytes.start, &entry.description)
    })
}

/// Context expansion of a whole record: each known attribute contributes
/// "description short_id" to the front of the title, and in-text ID
/// mentions in title and body get their description inserted before them.
pub fn expand_record(record: &Record, dictionary: &Dictionary) -> ExpandedRecord {
    let mut report = ExpansionReport::default();
    let (title, n) = expand_text(&record.title, dictionary);
    report.mentions_expanded += n;
    let body = record
        .body
        .iter()
        .map(|f| {
            let (text, n) = expand_text(&f.text, dictionary);
            report.mentions_expanded += n;
            Field::new(f.name.clone(), text)
        })
        .collect();

    let mut seen = HashSet::new();
    let mut prefix: Vec<String> = Vec::new();
    for attr in &record.attributes {
        if !seen.insert(attr.to_lowercase()) {
            continue;
        }
        match dictionary.by_long_id(attr) {
            Some(e) => {
                let phrase = annotation(e);
                if !has_annotation(&title, e) && !prefix.contains(&phrase) {
                    prefix.push(phrase);
                    report.attributes_expanded += 1;
                }
            }
            None => report.unknown_attributes.push(attr.clone()),
        }
    }
    let title = if prefix.is_empty() {
        title
    } else if title.is_empty() {
        prefix.join(" ")
    } else {
        format!("{} {}", prefix.join(" "), title)
    };
    ExpandedRecord {
        title,
        body,
        report,
    }
}
