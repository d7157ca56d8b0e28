use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{validate_records, CorpusError, Field, FunctionalLocationEntry, Record};

const ID: &str = "id";
const TIMESTAMP: &str = "timestamp";
const ATTRIBUTES: &str = "attributes";
const TITLE: &str = "title";

/// On-disk layout of a record collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Header row, one record per row. Columns `id`, `timestamp`,
    /// `attributes` (semicolon-joined long IDs) and `title` are required;
    /// every other column becomes a named body field.
    Delimited { delimiter: u8 },
    /// One JSON record object per line.
    JsonLines,
}

impl Default for CorpusFormat {
    fn default() -> Self {
        CorpusFormat::Delimited { delimiter: b'\t' }
    }
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" | "delimited" => Ok(CorpusFormat::Delimited { delimiter: b'\t' }),
            "csv" => Ok(CorpusFormat::Delimited { delimiter: b',' }),
            "jsonl" | "json-lines" | "jsonlines" => Ok(CorpusFormat::JsonLines),
            other => Err(CorpusError::InvalidArgument(format!(
                "unknown corpus format {other:?} (expected tsv, csv or jsonl)"
            ))),
        }
    }
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to tab-delimited.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => CorpusFormat::JsonLines,
            Some("csv") => CorpusFormat::Delimited { delimiter: b',' },
            _ => CorpusFormat::default(),
        }
    }
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<File, CorpusError> {
    File::create(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Record>, CorpusError> {
    read_corpus(BufReader::new(open(path)?), format)
}

pub fn read_corpus<R: Read>(reader: R, format: CorpusFormat) -> Result<Vec<Record>, CorpusError> {
    let (records, rows) = match format {
        CorpusFormat::Delimited { delimiter } => read_delimited(reader, delimiter)?,
        CorpusFormat::JsonLines => read_json_lines(reader)?,
    };
    validate_records(&records, &rows)?;
    Ok(records)
}

fn parse_timestamp(raw: &str, row: usize) -> Result<i64, CorpusError> {
    match raw.trim().parse::<i64>() {
        Ok(ts) if ts >= 0 => Ok(ts),
        _ => Err(CorpusError::InvalidTimestamp {
            row,
            value: raw.to_string(),
        }),
    }
}

fn read_delimited<R: Read>(
    reader: R,
    delimiter: u8,
) -> Result<(Vec<Record>, Vec<usize>), CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Format(e.to_string()))?
        .clone();
    let column = |name: &'static str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::Format(format!("missing column {name:?} in header")))
    };
    let (id_col, ts_col, attr_col, title_col) =
        (column(ID)?, column(TIMESTAMP)?, column(ATTRIBUTES)?, column(TITLE)?);
    let body_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| ![id_col, ts_col, attr_col, title_col].contains(i))
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| CorpusError::Row {
            row: row_no,
            message: e.to_string(),
        })?;
        let cell = |c: usize| row.get(c).unwrap_or_default();
        let attributes = cell(attr_col)
            .split(';')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(String::from)
            .collect();
        records.push(Record {
            id: cell(id_col).to_string(),
            timestamp: parse_timestamp(cell(ts_col), row_no)?,
            attributes,
            title: cell(title_col).to_string(),
            body: body_cols
                .iter()
                .map(|(c, name)| Field::new(name.clone(), cell(*c)))
                .collect(),
        });
        rows.push(row_no);
    }
    Ok((records, rows))
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<String>,
    timestamp: serde_json::Value,
    #[serde(default)]
    attributes: Vec<String>,
    #[serde(default)]
    title: String,
    #[serde(default)]
    body: Vec<Field>,
}

fn read_json_lines<R: Read>(reader: R) -> Result<(Vec<Record>, Vec<usize>), CorpusError> {
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|e| CorpusError::Row {
            row,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Row {
            row,
            message: e.to_string(),
        })?;
        let timestamp = match &raw.timestamp {
            serde_json::Value::Number(n) => n.as_i64().filter(|t| *t >= 0),
            serde_json::Value::String(s) => s.trim().parse::<i64>().ok().filter(|t| *t >= 0),
            _ => None,
        }
        .ok_or_else(|| CorpusError::InvalidTimestamp {
            row,
            value: raw.timestamp.to_string(),
        })?;
        records.push(Record {
            id: raw.id.unwrap_or_default(),
            timestamp,
            attributes: raw.attributes,
            title: raw.title,
            body: raw.body,
        });
        rows.push(row);
    }
    Ok((records, rows))
}

pub fn save_corpus(records: &[Record], path: &Path, format: CorpusFormat) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(create(path)?);
    write_corpus(records, &mut w, format)?;
    w.flush().map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes records so that [`read_corpus`] returns them unchanged. The
/// delimited format requires every record to carry the same body field names.
pub fn write_corpus<W: Write>(
    records: &[Record],
    writer: W,
    format: CorpusFormat,
) -> Result<(), CorpusError> {
    match format {
        CorpusFormat::JsonLines => {
            let mut w = writer;
            for r in records {
                serde_json::to_writer(&mut w, r).map_err(|e| CorpusError::Format(e.to_string()))?;
                w.write_all(b"\n")
                    .map_err(|e| CorpusError::Format(e.to_string()))?;
            }
            Ok(())
        }
        CorpusFormat::Delimited { delimiter } => write_delimited(records, writer, delimiter),
    }
}

fn write_delimited<W: Write>(records: &[Record], writer: W, delimiter: u8) -> Result<(), CorpusError> {
    let field_names: Vec<&str> = records
        .first()
        .map(|r| r.body.iter().map(|f| f.name.as_str()).collect())
        .unwrap_or_default();
    for name in &field_names {
        if [ID, TIMESTAMP, ATTRIBUTES, TITLE].contains(name) {
            return Err(CorpusError::InvalidArgument(format!(
                "body field name {name:?} collides with a reserved column"
            )));
        }
    }
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(writer);
    let csv_err = |e: csv::Error| CorpusError::Format(e.to_string());
    let mut header = vec![ID, TIMESTAMP, ATTRIBUTES, TITLE];
    header.extend(&field_names);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        if r.body.len() != field_names.len()
            || r.body.iter().zip(&field_names).any(|(f, n)| f.name != *n)
        {
            return Err(CorpusError::InvalidArgument(format!(
                "record {:?} has body fields that differ from the first record",
                r.id
            )));
        }
        if let Some(a) = r.attributes.iter().find(|a| a.contains(';') || a.trim() != a.as_str() || a.is_empty()) {
            return Err(CorpusError::InvalidArgument(format!(
                "record {:?}: attribute {a:?} cannot be stored in a delimited cell",
                r.id
            )));
        }
        let ts = r.timestamp.to_string();
        let attrs = r.attributes.join(";");
        let mut row: Vec<&str> = vec![&r.id, &ts, &attrs, &r.title];
        row.extend(r.body.iter().map(|f| f.text.as_str()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CorpusError::Format(e.to_string()))
}

pub fn load_dictionary(path: &Path) -> Result<Vec<FunctionalLocationEntry>, CorpusError> {
    load_dictionary_with(path, b'\t')
}

pub fn load_dictionary_with(
    path: &Path,
    delimiter: u8,
) -> Result<Vec<FunctionalLocationEntry>, CorpusError> {
    read_dictionary(BufReader::new(open(path)?), delimiter)
}

#[derive(Serialize, Deserialize)]
struct DictRow {
    long_id: String,
    short_id: String,
    description: String,
}

pub fn read_dictionary<R: Read>(
    reader: R,
    delimiter: u8,
) -> Result<Vec<FunctionalLocationEntry>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_reader(reader);
    let mut out = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, row) in rdr.deserialize::<DictRow>().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| CorpusError::Row {
            row: row_no,
            message: e.to_string(),
        })?;
        for (value, column) in [
            (&row.long_id, "long_id"),
            (&row.short_id, "short_id"),
            (&row.description, "description"),
        ] {
            if value.trim().is_empty() {
                return Err(CorpusError::EmptyColumn {
                    row: row_no,
                    column,
                });
            }
        }
        if let Some(&first) = seen.get(&row.long_id.to_lowercase()) {
            return Err(CorpusError::DuplicateLongId {
                long_id: row.long_id,
                row: row_no,
                first,
            });
        }
        seen.insert(row.long_id.to_lowercase(), row_no);
        out.push(FunctionalLocationEntry::new(row.long_id, row.short_id, row.description));
    }
    Ok(out)
}

pub fn save_dictionary(entries: &[FunctionalLocationEntry], path: &Path) -> Result<(), CorpusError> {
    let mut w = BufWriter::new(create(path)?);
    write_dictionary(entries, &mut w, b'\t')?;
    w.flush().map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_dictionary<W: Write>(
    entries: &[FunctionalLocationEntry],
    writer: W,
    delimiter: u8,
) -> Result<(), CorpusError> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(writer);
    let csv_err = |e: csv::Error| CorpusError::Format(e.to_string());
    w.write_record(["long_id", "short_id", "description"])
        .map_err(csv_err)?;
    for e in entries {
        w.write_record([&e.long_id, &e.short_id, &e.description])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CorpusError::Format(e.to_string()))
}
