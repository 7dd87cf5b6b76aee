//! Pair generators.
//!
//! * AR1 and AR2 swap one axis word for another of the same class between
//!   names that already agree on a different axis.
//! * MGA-Code maps a four-digit category name onto each of its six-digit
//!   children; MGA-Region maps a larger-region name onto the same disease
//!   center at a smaller region.
//!
//! Every generator is deterministic for a given seed and returns pairs in
//! canonical order.

mod index;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use index::TaggedIndex;

use crate::error::{Error, Result};
use crate::store::{canonical_sort, IcdVocabulary, NormPair, Provenance, RegionTree};
use crate::tagger::{AxisLabel, AxisSpan, TaggedTerm};
use crate::text::TermText;

pub const DEFAULT_MAX_PAIRS_PER_SOURCE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugConfig {
    pub enabled_methods: BTreeSet<Provenance>,
    pub axes_for_replacement: BTreeSet<AxisLabel>,
    pub max_pairs_per_source: usize,
    pub rng_seed: u64,
}

impl Default for AugConfig {
    fn default() -> Self {
        AugConfig {
            enabled_methods: Provenance::GENERATED.into_iter().collect(),
            axes_for_replacement: AxisLabel::ALL.into_iter().collect(),
            max_pairs_per_source: DEFAULT_MAX_PAIRS_PER_SOURCE,
            rng_seed: 0,
        }
    }
}

impl AugConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_pairs_per_source == 0 {
            return Err(Error::Config("max_pairs_per_source must be at least 1".into()));
        }
        if self.enabled_methods.contains(&Provenance::Original) {
            return Err(Error::Config("`original` is not a generation method".into()));
        }
        Ok(())
    }

    pub fn enabled(&self, method: Provenance) -> bool {
        self.enabled_methods.contains(&method)
    }
}

/// Substitutes the code points under `span` with `replacement`.
pub fn replace_span(term: &TermText, span: &AxisSpan, replacement: &str) -> Result<TermText> {
    if span.start >= span.end || span.end > term.len() {
        return Err(Error::InvalidSpan {
            start: span.start,
            end: span.end,
            len: term.len(),
        });
    }
    if replacement.is_empty() {
        return Err(Error::EmptyTerm);
    }
    let chars = term.chars();
    let mut out: Vec<char> = Vec::with_capacity(chars.len() + replacement.len());
    out.extend_from_slice(&chars[..span.start]);
    out.extend(replacement.chars());
    out.extend_from_slice(&chars[span.end..]);
    TermText::from_chars(out)
}

/// True when the two names agree on some axis other than `except`.
fn shares_axis(a: &TaggedTerm, b: &TaggedTerm, except: AxisLabel) -> bool {
    AxisLabel::ALL.into_iter().filter(|l| *l != except).any(|l| {
        matches!((a.axis_value(l), b.axis_value(l)), (Some(x), Some(y)) if x == y)
    })
}

/// Axis values of both names for `label` when both exist and differ.
fn differing_axis(a: &TaggedTerm, b: &TaggedTerm, label: AxisLabel) -> Option<(String, String)> {
    match (a.axis_value(label), b.axis_value(label)) {
        (Some(x), Some(y)) if x != y => Some((x, y)),
        _ => None,
    }
}

fn stable_hash(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Canonically orders one source's candidates and, if there are more than
/// `cap`, keeps a uniform sample drawn from a source-specific seeded stream.
fn cap_candidates(mut pairs: Vec<NormPair>, cap: usize, seed: u64, source: &[&str]) -> Vec<NormPair> {
    canonical_sort(&mut pairs);
    pairs.dedup_by(|a, b| a.canonical_cmp(b).is_eq());
    if pairs.len() <= cap {
        return pairs;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(source));
    let mut picked = sample(&mut rng, pairs.len(), cap).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| pairs[i].clone()).collect()
}

fn finish(chunks: Vec<Vec<NormPair>>) -> Vec<NormPair> {
    let mut out: Vec<NormPair> = chunks.into_iter().flatten().collect();
    canonical_sort(&mut out);
    out
}

/// AR1: for vocabulary names A and B that agree on one axis and differ on a
/// replaceable axis, rewrite A with B's value there and pair it with B.
///
/// Skipped: self-pairs, and rewrites that already name a different code in
/// the vocabulary.
pub fn ar1(vocab: &IcdVocabulary, idx: &TaggedIndex, cfg: &AugConfig) -> Vec<NormPair> {
    let sources: Vec<&TaggedTerm> = vocab
        .entries()
        .map(|e| e.name.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter_map(|name| idx.get(name))
        .collect();

    let chunks = sources
        .par_iter()
        .map(|a| {
            let mut found = Vec::new();
            for b in idx.sharing_any_axis(a) {
                let Some(b_codes) = vocab.codes_for_name(b.term().as_str()) else {
                    continue;
                };
                for &axis2 in &cfg.axes_for_replacement {
                    if differing_axis(a, b, axis2).is_none() || !shares_axis(a, b, axis2) {
                        continue;
                    }
                    let span = a.axis_span(axis2).expect("checked above");
                    let b_value = b.axis_value(axis2).expect("checked above");
                    let Ok(rewritten) = replace_span(a.term(), span, &b_value) else {
                        continue;
                    };
                    if rewritten == *b.term() {
                        continue;
                    }
                    let existing = vocab.codes_for_name(rewritten.as_str());
                    for code in b_codes {
                        if existing.is_some_and(|codes| !codes.contains(code)) {
                            continue;
                        }
                        found.push(NormPair::new(
                            rewritten.clone(),
                            b.term().clone(),
                            Some(code.clone()),
                            Provenance::Ar1,
                        ));
                    }
                }
            }
            cap_candidates(found, cfg.max_pairs_per_source, cfg.rng_seed, &["ar1", a.term().as_str()])
        })
        .collect();
    finish(chunks)
}

/// AR2: for a seed pair (U, S) and a vocabulary name C that agrees with S on
/// one axis and differs on a replaceable one, rewrite the leftmost
/// occurrence of S's value inside U with C's value and pair it with C.
pub fn ar2(task_pairs: &[NormPair], vocab: &IcdVocabulary, idx: &TaggedIndex, cfg: &AugConfig) -> Vec<NormPair> {
    let seeds: BTreeSet<(&TermText, &TermText)> = task_pairs
        .iter()
        .filter(|p| p.provenance == Provenance::Original)
        .map(|p| (&p.unnormalized, &p.standard))
        .collect();
    let seeds: Vec<_> = seeds.into_iter().collect();

    let chunks = seeds
        .par_iter()
        .map(|&(u, s)| {
            let Some(ts) = idx.get(s.as_str()) else {
                log::warn!("ar2: standard name `{s}` was never tagged; skipping");
                return Vec::new();
            };
            let mut found = Vec::new();
            for c in idx.sharing_any_axis(ts) {
                let Some(c_codes) = vocab.codes_for_name(c.term().as_str()) else {
                    continue;
                };
                for &axis2 in &cfg.axes_for_replacement {
                    let Some((s_value, c_value)) = differing_axis(ts, c, axis2) else {
                        continue;
                    };
                    if !shares_axis(ts, c, axis2) {
                        continue;
                    }
                    let needle: Vec<char> = s_value.chars().collect();
                    let Some(start) = u.find(&needle) else {
                        continue;
                    };
                    let site = AxisSpan::new(start, start + needle.len(), axis2);
                    let Ok(rewritten) = replace_span(u, &site, &c_value) else {
                        continue;
                    };
                    if rewritten == *c.term() {
                        continue;
                    }
                    for code in c_codes {
                        found.push(NormPair::new(
                            rewritten.clone(),
                            c.term().clone(),
                            Some(code.clone()),
                            Provenance::Ar2,
                        ));
                    }
                }
            }
            cap_candidates(
                found,
                cfg.max_pairs_per_source,
                cfg.rng_seed,
                &["ar2", u.as_str(), s.as_str()],
            )
        })
        .collect();
    finish(chunks)
}

/// MGA-Code: each four-digit name paired with every six-digit child.
pub fn mga_code(vocab: &IcdVocabulary) -> Vec<NormPair> {
    let mut out = Vec::new();
    for parent in vocab.four_digit() {
        for child in vocab.children_of(&parent.code) {
            if parent.name == child.name {
                continue;
            }
            out.push(NormPair::new(
                parent.name.clone(),
                child.name.clone(),
                Some(child.code.clone()),
                Provenance::MgaCode,
            ));
        }
    }
    canonical_sort(&mut out);
    out
}

/// MGA-Region: for names X and Y with the same disease center where Y's
/// region strictly contains X's, pair Y (unnormalized) with X (standard).
pub fn mga_region(vocab: &IcdVocabulary, idx: &TaggedIndex, tree: &RegionTree) -> Vec<NormPair> {
    // group vocabulary names by disease center
    let mut by_center: BTreeMap<String, Vec<&TaggedTerm>> = BTreeMap::new();
    let names: BTreeSet<&str> = vocab.entries().map(|e| e.name.as_str()).collect();
    for name in names {
        if let Some(t) = idx.get(name) {
            if let (Some(center), Some(_)) = (t.axis_value(AxisLabel::Center), t.axis_value(AxisLabel::Region)) {
                by_center.entry(center).or_default().push(t);
            }
        }
    }

    let mut out = Vec::new();
    for group in by_center.values() {
        for x in group {
            let rx = x.axis_value(AxisLabel::Region).expect("grouped with region");
            for y in group {
                let ry = y.axis_value(AxisLabel::Region).expect("grouped with region");
                if x.term() == y.term() || !tree.is_ancestor_region(&ry, &rx) {
                    continue;
                }
                for code in vocab.codes_for_name(x.term().as_str()).into_iter().flatten() {
                    out.push(NormPair::new(
                        y.term().clone(),
                        x.term().clone(),
                        Some(code.clone()),
                        Provenance::MgaRegion,
                    ));
                }
            }
        }
    }
    canonical_sort(&mut out);
    out
}

/// Runs every enabled generator. Keys are present only for enabled methods.
pub fn generate(
    vocab: &IcdVocabulary,
    idx: &TaggedIndex,
    tree: &RegionTree,
    task_pairs: &[NormPair],
    cfg: &AugConfig,
) -> BTreeMap<Provenance, Vec<NormPair>> {
    let mut out = BTreeMap::new();
    if cfg.enabled(Provenance::Ar1) {
        out.insert(Provenance::Ar1, ar1(vocab, idx, cfg));
    }
    if cfg.enabled(Provenance::Ar2) {
        out.insert(Provenance::Ar2, ar2(task_pairs, vocab, idx, cfg));
    }
    if cfg.enabled(Provenance::MgaCode) {
        out.insert(Provenance::MgaCode, mga_code(vocab));
    }
    if cfg.enabled(Provenance::MgaRegion) {
        out.insert(Provenance::MgaRegion, mga_region(vocab, idx, tree));
    }
    out
}
