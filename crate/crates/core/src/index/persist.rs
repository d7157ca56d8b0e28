//! Index directory layout (format version 1):
//!
//! ```text
//! manifest.json    format version, N, dim, provider spec and fingerprint, config hash
//! docstore.jsonl   records, one JSON object per line, in ordinal order
//! dictionary.tsv   functional-location dictionary used for expansion
//! stopwords.txt    one stopword per line
//! lemmas.tsv       surface<TAB>lemma
//! postings.tsv     term<TAB>space-separated ascending ordinals
//! doc_terms.tsv    one line per record, space-separated semantic terms
//! vectors.bin      N x dim little-endian f32, row-major
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Index, IndexConfig, IndexError};
use crate::corpus::{read_corpus, read_dictionary, write_corpus, write_dictionary, CorpusFormat, Dictionary};
use crate::embedding::ProviderSpec;
use crate::preprocess::{format_lemma_table, load_lemma_table, parse_stopwords, NormalizationConfig};

pub const FORMAT_VERSION: u32 = 1;
const SUPPORTED_VERSIONS: &[u32] = &[FORMAT_VERSION];

const MANIFEST: &str = "manifest.json";
const DOCSTORE: &str = "docstore.jsonl";
const DICTIONARY: &str = "dictionary.tsv";
const STOPWORDS: &str = "stopwords.txt";
const LEMMAS: &str = "lemmas.tsv";
const POSTINGS: &str = "postings.tsv";
const DOC_TERMS: &str = "doc_terms.tsv";
const VECTORS: &str = "vectors.bin";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub doc_count: usize,
    pub dim: usize,
    pub vocabulary_size: usize,
    pub provider: ProviderSpec,
    pub provider_fingerprint: String,
    pub config_hash: String,
    pub preserve_case: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IndexError + '_ {
    move |source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), IndexError> {
    let mut f = BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    f.write_all(bytes).map_err(io_err(path))?;
    f.flush().map_err(io_err(path))
}

fn read_text(path: &Path) -> Result<String, IndexError> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn save_index(index: &Index, dir: &Path) -> Result<(), IndexError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        doc_count: index.doc_count(),
        dim: index.dim,
        vocabulary_size: index.postings.len(),
        provider: index.provider.clone(),
        provider_fingerprint: index.fingerprint.clone(),
        config_hash: index.config.config_hash(),
        preserve_case: index.config.normalization.preserve_case,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| IndexError::Corrupt(e.to_string()))?;
    json.push(b'\n');
    write_file(&dir.join(MANIFEST), &json)?;

    let mut docs = Vec::new();
    write_corpus(&index.records, &mut docs, CorpusFormat::JsonLines)?;
    write_file(&dir.join(DOCSTORE), &docs)?;

    let mut dict = Vec::new();
    write_dictionary(index.dictionary.entries(), &mut dict, b'\t')?;
    write_file(&dir.join(DICTIONARY), &dict)?;

    let norm = &index.config.normalization;
    let stop: String = norm.stopwords().iter().map(|s| format!("{s}\n")).collect();
    write_file(&dir.join(STOPWORDS), stop.as_bytes())?;
    write_file(&dir.join(LEMMAS), format_lemma_table(norm.lemmas()).as_bytes())?;

    let mut postings = String::new();
    for (term, docs) in &index.postings {
        postings.push_str(term);
        postings.push('\t');
        let ords: Vec<String> = docs.iter().map(u32::to_string).collect();
        postings.push_str(&ords.join(" "));
        postings.push('\n');
    }
    write_file(&dir.join(POSTINGS), postings.as_bytes())?;

    let terms: String = index
        .doc_terms
        .iter()
        .map(|t| format!("{}\n", t.join(" ")))
        .collect();
    write_file(&dir.join(DOC_TERMS), terms.as_bytes())?;

    let mut vecs = Vec::with_capacity(index.doc_vectors.len() * 4);
    for x in &index.doc_vectors {
        vecs.extend_from_slice(&x.to_le_bytes());
    }
    write_file(&dir.join(VECTORS), &vecs)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, IndexError> {
    let path = dir.join(MANIFEST);
    let text = read_text(&path)?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| IndexError::Corrupt(format!("{MANIFEST}: {e}")))?;
    let version = raw
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| IndexError::Corrupt(format!("{MANIFEST}: missing format_version")))?;
    if !SUPPORTED_VERSIONS.contains(&(version as u32)) || version > u64::from(u32::MAX) {
        return Err(IndexError::UnsupportedVersion {
            found: version.min(u64::from(u32::MAX)) as u32,
            supported: SUPPORTED_VERSIONS.to_vec(),
        });
    }
    serde_json::from_value(raw).map_err(|e| IndexError::Corrupt(format!("{MANIFEST}: {e}")))
}

pub fn load_index(dir: &Path) -> Result<Index, IndexError> {
    let manifest = read_manifest(dir)?;
    if let ProviderSpec::Hashed { dim, .. } = manifest.provider {
        if dim != manifest.dim {
            return Err(IndexError::DimensionMismatch {
                manifest: manifest.dim,
                other: "provider spec",
                found: dim,
            });
        }
    }
    let n = manifest.doc_count;

    let docs = fs::read(dir.join(DOCSTORE)).map_err(io_err(&dir.join(DOCSTORE)))?;
    let records = read_corpus(docs.as_slice(), CorpusFormat::JsonLines)?;
    if records.len() != n {
        return Err(IndexError::Corrupt(format!(
            "{DOCSTORE} has {} records, manifest says {n}",
            records.len()
        )));
    }

    let dict_bytes = fs::read(dir.join(DICTIONARY)).map_err(io_err(&dir.join(DICTIONARY)))?;
    let dictionary = Dictionary::new(read_dictionary(dict_bytes.as_slice(), b'\t')?);

    let stopwords = parse_stopwords(&read_text(&dir.join(STOPWORDS))?);
    let lemmas = load_lemma_table(&dir.join(LEMMAS))?;
    let mut normalization =
        NormalizationConfig::new(stopwords.iter().map(String::as_str), lemmas);
    normalization.preserve_case = manifest.preserve_case;
    let config = IndexConfig::new(normalization);
    if config.config_hash() != manifest.config_hash {
        return Err(IndexError::Corrupt(
            "normalization files do not match the manifest config hash".into(),
        ));
    }

    let mut postings = BTreeMap::new();
    for (i, line) in read_text(&dir.join(POSTINGS))?.lines().enumerate() {
        let (term, ords) = line
            .split_once('\t')
            .ok_or_else(|| IndexError::Corrupt(format!("{POSTINGS}:{}: missing tab", i + 1)))?;
        let ords: Vec<u32> = ords
            .split(' ')
            .map(|o| o.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|e| IndexError::Corrupt(format!("{POSTINGS}:{}: {e}", i + 1)))?;
        if ords.is_empty()
            || ords.windows(2).any(|w| w[0] >= w[1])
            || ords.last().is_some_and(|&o| o as usize >= n)
        {
            return Err(IndexError::Corrupt(format!(
                "{POSTINGS}:{}: postings must be ascending ordinals below {n}",
                i + 1
            )));
        }
        postings.insert(term.to_string(), ords);
    }
    if postings.len() != manifest.vocabulary_size {
        return Err(IndexError::Corrupt(format!(
            "{POSTINGS} has {} terms, manifest says {}",
            postings.len(),
            manifest.vocabulary_size
        )));
    }

    let terms_text = read_text(&dir.join(DOC_TERMS))?;
    let doc_terms: Vec<Vec<String>> = terms_text
        .split_terminator('\n')
        .map(|l| l.split(' ').filter(|t| !t.is_empty()).map(String::from).collect())
        .collect();
    if doc_terms.len() != n {
        return Err(IndexError::Corrupt(format!(
            "{DOC_TERMS} has {} lines, manifest says {n}",
            doc_terms.len()
        )));
    }

    let vec_path = dir.join(VECTORS);
    let bytes = fs::read(&vec_path).map_err(io_err(&vec_path))?;
    let expected = n * manifest.dim * 4;
    if bytes.len() != expected {
        if n > 0 && bytes.len() % (n * 4) == 0 {
            return Err(IndexError::DimensionMismatch {
                manifest: manifest.dim,
                other: VECTORS,
                found: bytes.len() / (n * 4),
            });
        }
        return Err(IndexError::Corrupt(format!(
            "{VECTORS} has {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let doc_vectors: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if doc_vectors.iter().any(|x| !x.is_finite()) {
        return Err(IndexError::Corrupt(format!("{VECTORS} contains non-finite values")));
    }

    Ok(Index::assemble(
        records,
        dictionary,
        config,
        manifest.provider,
        manifest.provider_fingerprint,
        manifest.dim,
        postings,
        doc_terms,
        doc_vectors,
    ))
}
