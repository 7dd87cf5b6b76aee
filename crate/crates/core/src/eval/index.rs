use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::filter::ngm_score;
use crate::store::NormPair;
use crate::text::TermText;

/// Retrieval normalizer: standard names plus surface forms that map onto
/// them. A query scores each standard name by its best n-gram match over
/// that name's surface forms (the name itself included).
#[derive(Debug, Clone, Default)]
pub struct SynonymIndex {
    standards: BTreeSet<String>,
    forms: BTreeMap<TermText, BTreeSet<String>>,
}

impl SynonymIndex {
    pub fn new() -> Self {
        SynonymIndex::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = &'a NormPair>) -> Self {
        let mut idx = SynonymIndex::new();
        for p in pairs {
            idx.add_pair(p);
        }
        idx
    }

    pub fn add_standard(&mut self, standard: &TermText) {
        self.standards.insert(standard.to_string());
        self.forms
            .entry(standard.clone())
            .or_default()
            .insert(standard.to_string());
    }

    /// Adds the pair's standard name to the label space and its
    /// unnormalized side as a surface form of it.
    pub fn add_pair(&mut self, pair: &NormPair) {
        self.add_standard(&pair.standard);
        self.forms
            .entry(pair.unnormalized.clone())
            .or_default()
            .insert(pair.standard.to_string());
    }

    pub fn standards(&self) -> &BTreeSet<String> {
        &self.standards
    }

    pub fn n_forms(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.standards.is_empty()
    }

    /// Top `k` standard names by descending score, ties by name.
    pub fn rank(&self, query: &TermText, k: usize) -> Result<Vec<(String, f64)>> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for (form, standards) in &self.forms {
            let score = ngm_score(query, form);
            for s in standards {
                let slot = best.entry(s.as_str()).or_insert(0.0);
                if score > *slot {
                    *slot = score;
                }
            }
        }
        let mut ranked: Vec<(String, f64)> = best.into_iter().map(|(s, v)| (s.to_string(), v)).collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        Ok(ranked)
    }
}
