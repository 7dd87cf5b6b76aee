//! Embedding providers and cosine similarity.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::{normalize, TermText};

pub const DEFAULT_DIMENSION: usize = 256;

pub trait EmbeddingProvider: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// Deterministic fixed-width vector for a term.
    fn embed(&self, term: &TermText) -> Result<Vec<f64>>;
}

/// Bag of hashed character unigrams and bigrams.
///
/// Each gram's UTF-8 bytes are hashed with 64-bit FNV-1a and the bucket
/// `hash % dimension` is incremented, so the components of a term of length
/// `L` sum to `L + (L - 1)`.
#[derive(Debug, Clone)]
pub struct HashedNgramEmbedder {
    dimension: usize,
}

impl HashedNgramEmbedder {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        Ok(HashedNgramEmbedder { dimension })
    }

    fn bucket(&self, gram: &[char]) -> usize {
        let mut buf = [0u8; 4];
        let mut h = FNV_OFFSET;
        for c in gram {
            for b in c.encode_utf8(&mut buf).bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(FNV_PRIME);
            }
        }
        (h % self.dimension as u64) as usize
    }
}

impl Default for HashedNgramEmbedder {
    fn default() -> Self {
        HashedNgramEmbedder {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl EmbeddingProvider for HashedNgramEmbedder {
    fn name(&self) -> &str {
        "hashed-ngram"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, term: &TermText) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.dimension];
        let chars = term.chars();
        for gram in chars.windows(1).chain(chars.windows(2)) {
            v[self.bucket(gram)] += 1.0;
        }
        Ok(v)
    }
}

/// Precomputed vectors read from `term<TAB>v1,v2,...` lines.
#[derive(Debug, Clone)]
pub struct VectorFileEmbedder {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl VectorFileEmbedder {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut dimension = None;
        let mut vectors = HashMap::new();
        for (line_no, line) in crate::store::read_lines(path)? {
            let (term, values) = line
                .split_once('\t')
                .ok_or_else(|| Error::malformed(path, line_no, "expected `term<TAB>v1,v2,...`"))?;
            let term = normalize(term);
            if term.is_empty() {
                return Err(Error::EmptyField {
                    path: path.into(),
                    line: line_no,
                    field: "term",
                });
            }
            let vector = values
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::malformed(path, line_no, format!("bad vector component: {e}")))?;
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::malformed(path, line_no, "non-finite vector component"));
            }
            match dimension {
                None => dimension = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(Error::malformed(
                        path,
                        line_no,
                        format!("vector has {} components, expected {d}", vector.len()),
                    ))
                }
                Some(_) => {}
            }
            vectors.insert(term, vector);
        }
        Ok(VectorFileEmbedder {
            dimension: dimension.unwrap_or(0),
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for VectorFileEmbedder {
    fn name(&self) -> &str {
        "vector-file"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, term: &TermText) -> Result<Vec<f64>> {
        self.vectors
            .get(term.as_str())
            .cloned()
            .ok_or_else(|| Error::EmbeddingUnavailable(term.to_string()))
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na * nb).sqrt()).clamp(-1.0, 1.0))
}
