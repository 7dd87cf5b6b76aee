//! Two-stage semantic filter for generated pairs: a pair survives only if
//! its n-gram matching score exceeds `alpha` and the cosine similarity of
//! its embeddings exceeds `beta`. Both comparisons are strict.

mod embed;
mod ngram;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use embed::{cosine, EmbeddingProvider, HashedNgramEmbedder, VectorFileEmbedder, DEFAULT_DIMENSION};
pub use ngram::{ngm_chars, ngm_score, ngm_score_with, NGramProfile, NgmMode};

use crate::error::{Error, Result};
use crate::store::{NormPair, PairScores, Provenance};

pub const DEFAULT_ALPHA: f64 = 0.7;
pub const DEFAULT_BETA: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EmbedderChoice {
    Hashed { dimension: usize },
    File { path: PathBuf },
}

impl Default for EmbedderChoice {
    fn default() -> Self {
        EmbedderChoice::Hashed {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

impl EmbedderChoice {
    pub fn build(&self) -> Result<Box<dyn EmbeddingProvider>> {
        Ok(match self {
            EmbedderChoice::Hashed { dimension } => Box::new(HashedNgramEmbedder::new(*dimension)?),
            EmbedderChoice::File { path } => Box::new(VectorFileEmbedder::load(path)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub alpha: f64,
    pub beta: f64,
    pub ngm_mode: NgmMode,
    pub embedder: EmbedderChoice,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            ngm_mode: NgmMode::Multiset,
            embedder: EmbedderChoice::default(),
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha < 0.0 {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("beta must lie in [-1, 1], got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    NgmBelowAlpha,
    CosBelowBeta,
    EmbeddingUnavailable,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::NgmBelowAlpha => "ngm_below_alpha",
            DropReason::CosBelowBeta => "cos_below_beta",
            DropReason::EmbeddingUnavailable => "embedding_unavailable",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub kept: Vec<NormPair>,
    pub dropped: BTreeMap<Provenance, BTreeMap<DropReason, usize>>,
}

impl FilterOutcome {
    pub fn dropped_by_reason(&self) -> BTreeMap<DropReason, usize> {
        let mut out = BTreeMap::new();
        for reasons in self.dropped.values() {
            for (r, n) in reasons {
                *out.entry(*r).or_insert(0) += n;
            }
        }
        out
    }

    pub fn dropped_total(&self) -> usize {
        self.dropped.values().flat_map(|m| m.values()).sum()
    }
}

pub struct SemanticFilter {
    alpha: f64,
    beta: f64,
    mode: NgmMode,
    provider: Box<dyn EmbeddingProvider>,
}

impl SemanticFilter {
    pub fn from_config(cfg: &FilterConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(SemanticFilter {
            alpha: cfg.alpha,
            beta: cfg.beta,
            mode: cfg.ngm_mode,
            provider: cfg.embedder.build()?,
        })
    }

    pub fn with_provider(cfg: &FilterConfig, provider: Box<dyn EmbeddingProvider>) -> Result<Self> {
        cfg.validate()?;
        Ok(SemanticFilter {
            alpha: cfg.alpha,
            beta: cfg.beta,
            mode: cfg.ngm_mode,
            provider,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn provider(&self) -> &dyn EmbeddingProvider {
        self.provider.as_ref()
    }

    /// Both scores for a pair, or the reason they could not be computed.
    pub fn score(&self, pair: &NormPair) -> Result<PairScores> {
        let ngm = ngm_score_with(&pair.unnormalized, &pair.standard, self.mode);
        let cos = cosine(
            &self.provider.embed(&pair.unnormalized)?,
            &self.provider.embed(&pair.standard)?,
        )?;
        Ok(PairScores { ngm, cos })
    }

    // Written as "not above" so a NaN score is dropped too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn judge(&self, pair: &NormPair) -> std::result::Result<PairScores, DropReason> {
        let ngm = ngm_score_with(&pair.unnormalized, &pair.standard, self.mode);
        if !(ngm > self.alpha) {
            return Err(DropReason::NgmBelowAlpha);
        }
        let embed = |t| self.provider.embed(t).map_err(|_| DropReason::EmbeddingUnavailable);
        let cos = cosine(&embed(&pair.unnormalized)?, &embed(&pair.standard)?)
            .map_err(|_| DropReason::EmbeddingUnavailable)?;
        if !(cos > self.beta) {
            return Err(DropReason::CosBelowBeta);
        }
        Ok(PairScores { ngm, cos })
    }

    /// Keeps generated pairs above both thresholds, attaching their scores.
    /// Original pairs pass through untouched. Input order is preserved.
    pub fn filter_pairs(&self, pairs: Vec<NormPair>) -> FilterOutcome {
        let verdicts: Vec<(NormPair, std::result::Result<Option<PairScores>, DropReason>)> = pairs
            .into_par_iter()
            .map(|p| {
                let v = if p.provenance == Provenance::Original {
                    Ok(None)
                } else {
                    self.judge(&p).map(Some)
                };
                (p, v)
            })
            .collect();

        let mut out = FilterOutcome::default();
        for (mut pair, verdict) in verdicts {
            match verdict {
                Ok(None) => out.kept.push(pair),
                Ok(Some(scores)) => {
                    pair.scores = Some(scores);
                    out.kept.push(pair);
                }
                Err(reason) => {
                    *out.dropped
                        .entry(pair.provenance)
                        .or_default()
                        .entry(reason)
                        .or_insert(0) += 1;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TermText;

    fn pair(u: &str, s: &str) -> NormPair {
        NormPair::new(TermText::new(u).unwrap(), TermText::new(s).unwrap(), None, Provenance::Ar1)
    }

    fn default_filter() -> SemanticFilter {
        SemanticFilter::from_config(&FilterConfig::default()).unwrap()
    }

    #[test]
    fn defaults() {
        let cfg = FilterConfig::default();
        assert_eq!(cfg.alpha, 0.7);
        assert_eq!(cfg.beta, 0.8);
        assert_eq!(cfg.ngm_mode, NgmMode::Multiset);
        assert_eq!(cfg.embedder, EmbedderChoice::Hashed { dimension: 256 });
    }

    #[test]
    fn identical_kept_disjoint_dropped() {
        let out = default_filter().filter_pairs(vec![pair("肺恶性肿瘤", "肺恶性肿瘤"), pair("肺癌", "肝炎")]);
        assert_eq!(out.kept.len(), 1);
        let s = out.kept[0].scores.unwrap();
        assert_eq!(s.ngm, 3.0);
        assert_eq!(s.cos, 1.0);
        assert_eq!(out.dropped_by_reason()[&DropReason::NgmBelowAlpha], 1);
    }

    #[test]
    fn boundary_ngm_is_dropped() {
        // "abcdefghij" vs "abcdefghxy": lengths 10, shorter m = 10;
        // shared 1-grams 8, 2-grams 7, 3-grams 6 ... 8-grams 1 => 36/10 = 3.6.
        // Use alpha equal to that exact value.
        let p = pair("abcdefghij", "abcdefghxy");
        let ngm = ngm_score(&p.unnormalized, &p.standard);
        assert_eq!(ngm, 3.6);
        let cfg = FilterConfig {
            alpha: ngm,
            beta: -1.0,
            ..FilterConfig::default()
        };
        let out = SemanticFilter::from_config(&cfg).unwrap().filter_pairs(vec![p]);
        assert!(out.kept.is_empty());

        // 7 shared characters, no shared bigrams, shorter length 10 => 0.7
        let p = pair("abcdefghij", "acegbdfXYZ");
        assert_eq!(ngm_score(&p.unnormalized, &p.standard), 0.7);
        assert!(default_filter().filter_pairs(vec![p]).kept.is_empty());
    }

    #[test]
    fn originals_bypass() {
        let mut p = pair("肺癌", "肝炎");
        p.provenance = Provenance::Original;
        let out = default_filter().filter_pairs(vec![p.clone()]);
        assert_eq!(out.kept, vec![p]);
    }

    #[test]
    fn missing_embedding_counted() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "肺恶性肿瘤\t1,0").unwrap();
        let cfg = FilterConfig {
            embedder: EmbedderChoice::File { path: f.path().into() },
            ..FilterConfig::default()
        };
        let out = SemanticFilter::from_config(&cfg)
            .unwrap()
            .filter_pairs(vec![pair("左肺恶性肿瘤", "肺恶性肿瘤")]);
        assert!(out.kept.is_empty());
        assert_eq!(out.dropped[&Provenance::Ar1][&DropReason::EmbeddingUnavailable], 1);
    }

    #[test]
    fn invalid_thresholds() {
        for (alpha, beta) in [(-0.1, 0.8), (0.7, 1.5), (f64::NAN, 0.0)] {
            let cfg = FilterConfig {
                alpha,
                beta,
                ..FilterConfig::default()
            };
            assert!(cfg.validate().is_err());
        }
    }
}
