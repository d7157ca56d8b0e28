use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{normalize_to_f32, EmbeddingError, EmbeddingProvider, HashedProvider, ProviderSpec};

/// Word vectors from a text file (`count dim` header, then `token c1 .. c_dim`
/// per line). Out-of-vocabulary terms fall back to a [`HashedProvider`] of
/// the same dimension.
#[derive(Debug, Clone)]
pub struct FileProvider {
    path: PathBuf,
    vectors: HashMap<String, Vec<f32>>,
    fallback: HashedProvider,
    fallback_seed: u64,
    fingerprint: String,
}

impl FileProvider {
    pub fn load(path: &Path, fallback_seed: u64) -> Result<Self, EmbeddingError> {
        let bytes = fs::read(path).map_err(|source| EmbeddingError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| EmbeddingError::Format {
            line: 0,
            message: format!("not valid UTF-8: {e}"),
        })?;
        let mut provider = Self::parse(&text, fallback_seed)?;
        let mut h = Sha256::new();
        h.update(b"word-vectors/v1;");
        h.update(&bytes);
        h.update(format!(";fallback_seed={fallback_seed}").as_bytes());
        provider.fingerprint = hex::encode(&h.finalize()[..16]);
        provider.path = path.to_path_buf();
        Ok(provider)
    }

    /// Parses the text format. The fingerprint covers the text itself.
    pub fn parse(text: &str, fallback_seed: u64) -> Result<Self, EmbeddingError> {
        let fmt = |line: usize, message: String| EmbeddingError::Format { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| fmt(1, "missing \"count dim\" header".into()))?;
        let mut head = header.split_whitespace();
        let (count, dim) = match (head.next(), head.next(), head.next()) {
            (Some(c), Some(d), None) => (
                c.parse::<usize>()
                    .map_err(|e| fmt(1, format!("bad count: {e}")))?,
                d.parse::<usize>()
                    .map_err(|e| fmt(1, format!("bad dimension: {e}")))?,
            ),
            _ => return Err(fmt(1, "header must be \"count dim\"".into())),
        };
        let fallback = HashedProvider::new(fallback_seed, dim)?;
        let mut vectors = HashMap::with_capacity(count);
        for (i, line) in lines {
            let line_no = i + 1;
            let mut parts = line.split_whitespace();
            let token = parts.next().unwrap_or_default().to_string();
            let comps: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|e| fmt(line_no, format!("bad component {p:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if comps.len() != dim {
                return Err(fmt(
                    line_no,
                    format!("dimension mismatch: expected {dim} components, found {}", comps.len()),
                ));
            }
            if comps.iter().any(|c| !c.is_finite()) {
                return Err(fmt(line_no, format!("non-finite component for {token:?}")));
            }
            vectors.insert(token, normalize_to_f32(&comps));
        }
        if vectors.len() != count {
            return Err(fmt(
                1,
                format!("header announces {count} vectors, file has {}", vectors.len()),
            ));
        }
        let digest = Sha256::digest(format!("word-vectors/v1;{text};fallback_seed={fallback_seed}"));
        Ok(Self {
            path: PathBuf::new(),
            vectors,
            fallback,
            fallback_seed,
            fingerprint: hex::encode(&digest[..16]),
        })
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vectors.len()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.vectors.contains_key(term)
    }
}

impl EmbeddingProvider for FileProvider {
    fn dim(&self) -> usize {
        self.fallback.dim()
    }

    fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn spec(&self) -> ProviderSpec {
        ProviderSpec::File {
            path: self.path.clone(),
            fallback_seed: self.fallback_seed,
        }
    }

    fn embed(&self, term: &str) -> Vec<f32> {
        match self.vectors.get(term) {
            Some(v) => v.clone(),
            None => self.fallback.embed(term),
        }
    }
}
