use sha2::{Digest, Sha256};

use super::{char_ngrams, normalize_to_f32, EmbeddingError, EmbeddingProvider, ProviderSpec, NGRAM_MAX, NGRAM_MIN};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// 64-bit FNV-1a over raw bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stand-in for a pretrained subword model.
///
/// Each character n-gram feature `f` gets a pseudo-random vector whose
/// component `j` is
///
/// ```text
/// base = splitmix64(seed * GOLDEN) ^ fnv1a64(f)
/// z    = splitmix64(base + (j + 1) * GOLDEN)        (wrapping arithmetic)
/// c_j  = (z >> 11) / 2^53 * 2 - 1                    (in [-1, 1))
/// ```
///
/// with `GOLDEN = 0x9e3779b97f4a7c15`. A term vector is the mean of its
/// feature vectors, normalized to unit length and stored as `f32`.
#[derive(Debug, Clone)]
pub struct HashedProvider {
    seed: u64,
    dim: usize,
    base_seed: u64,
    fingerprint: String,
}

impl HashedProvider {
    pub fn new(seed: u64, dim: usize) -> Result<Self, EmbeddingError> {
        if dim < 8 {
            return Err(EmbeddingError::InvalidParameter(format!(
                "dimension must be at least 8, got {dim}"
            )));
        }
        let ident = format!("hashed-ngram/v1;seed={seed};dim={dim};ngrams={NGRAM_MIN}-{NGRAM_MAX}");
        let digest = Sha256::digest(ident.as_bytes());
        Ok(Self {
            seed,
            dim,
            base_seed: splitmix64(seed.wrapping_mul(GOLDEN)),
            fingerprint: hex::encode(&digest[..16]),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn accumulate(&self, feature: &str, acc: &mut [f64]) {
        let base = self.base_seed ^ fnv1a64(feature.as_bytes());
        for (j, a) in acc.iter_mut().enumerate() {
            let z = splitmix64(base.wrapping_add((j as u64 + 1).wrapping_mul(GOLDEN)));
            *a += (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        }
    }
}

impl EmbeddingProvider for HashedProvider {
    fn dim(&self) -> usize {
        self.dim
    }

    fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn spec(&self) -> ProviderSpec {
        ProviderSpec::Hashed {
            seed: self.seed,
            dim: self.dim,
        }
    }

    fn embed(&self, term: &str) -> Vec<f32> {
        if term.is_empty() {
            return vec![0.0; self.dim];
        }
        let features = char_ngrams(term, NGRAM_MIN, NGRAM_MAX);
        let mut acc = vec![0.0f64; self.dim];
        for f in &features {
            self.accumulate(f, &mut acc);
        }
        let n = features.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        normalize_to_f32(&acc)
    }
}
