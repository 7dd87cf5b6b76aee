//! Normalized n-gram matching score.
//!
//! For names `u` and `s` with shorter length `m`, the score is the number of
//! matched n-grams for every `n` in `1..=m`, summed and divided by `m`.
//! Matching is multiset intersection by default: an n-gram occurring twice
//! in both names counts twice. The score is not bounded by 1; a name scored
//! against itself gives `(len + 1) / 2`.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::TermText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NgmMode {
    /// Sum of `min(count_u(g), count_s(g))` over shared n-grams.
    #[default]
    Multiset,
    /// Number of distinct shared n-grams.
    DistinctSet,
}

impl FromStr for NgmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "multiset" => Ok(NgmMode::Multiset),
            "distinct-set" | "distinct" => Ok(NgmMode::DistinctSet),
            other => Err(Error::Config(format!("unknown ngm mode `{other}`"))),
        }
    }
}

/// Every n-gram of a term, for every `n` from 1 to its length, with counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramProfile {
    levels: Vec<HashMap<Vec<char>, usize>>,
}

impl NGramProfile {
    pub fn new(term: &TermText) -> Self {
        let chars = term.chars();
        let levels = (1..=chars.len())
            .map(|n| {
                let mut counts = HashMap::new();
                for gram in chars.windows(n) {
                    *counts.entry(gram.to_vec()).or_insert(0) += 1;
                }
                counts
            })
            .collect();
        NGramProfile { levels }
    }

    /// Longest n for which grams are recorded (the term length).
    pub fn max_n(&self) -> usize {
        self.levels.len()
    }

    /// Multiset of n-grams at level `n` (1-based).
    pub fn level(&self, n: usize) -> Option<&HashMap<Vec<char>, usize>> {
        n.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Number of n-grams at level `n`, counting repeats.
    pub fn level_size(&self, n: usize) -> usize {
        self.level(n).map_or(0, |m| m.values().sum())
    }
}

pub fn ngm_score(u: &TermText, s: &TermText) -> f64 {
    ngm_score_with(u, s, NgmMode::Multiset)
}

pub fn ngm_score_with(u: &TermText, s: &TermText, mode: NgmMode) -> f64 {
    ngm_chars(u.chars(), s.chars(), mode).expect("TermText is never empty")
}

/// Score over raw code-point slices; errors on an empty side.
pub fn ngm_chars(u: &[char], s: &[char], mode: NgmMode) -> Result<f64> {
    let m = u.len().min(s.len());
    if m == 0 {
        return Err(Error::EmptyTerm);
    }
    let mut left: Vec<&[char]> = Vec::with_capacity(u.len());
    let mut right: Vec<&[char]> = Vec::with_capacity(s.len());
    let mut matched = 0usize;
    for n in 1..=m {
        left.clear();
        right.clear();
        left.extend(u.windows(n));
        right.extend(s.windows(n));
        left.sort_unstable();
        right.sort_unstable();
        if mode == NgmMode::DistinctSet {
            left.dedup();
            right.dedup();
        }
        let level = sorted_intersection_size(&left, &right);
        if level == 0 {
            // every longer shared gram would contain a shared shorter one
            break;
        }
        matched += level;
    }
    Ok(matched as f64 / m as f64)
}

fn sorted_intersection_size(a: &[&[char]], b: &[&[char]]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
