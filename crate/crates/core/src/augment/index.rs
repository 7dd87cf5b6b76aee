use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::tagger::{AxisLabel, AxisTagger, TaggedTerm};
use crate::text::TermText;

/// Tagged terms keyed by text, with an inverted index from
/// `(label, axis value)` to the terms carrying that value.
#[derive(Debug, Clone, Default)]
pub struct TaggedIndex {
    terms: BTreeMap<String, TaggedTerm>,
    by_axis: BTreeMap<(AxisLabel, String), BTreeSet<String>>,
}

impl TaggedIndex {
    /// Tags every distinct term (in parallel) and indexes the results.
    pub fn build<'a>(tagger: &dyn AxisTagger, terms: impl IntoIterator<Item = &'a TermText>) -> Self {
        let distinct: BTreeSet<&TermText> = terms.into_iter().collect();
        let distinct: Vec<&TermText> = distinct.into_iter().collect();
        let tagged: Vec<TaggedTerm> = distinct.par_iter().map(|t| tagger.tag(t)).collect();
        let mut idx = TaggedIndex::default();
        for t in tagged {
            idx.insert(t);
        }
        idx
    }

    pub fn insert(&mut self, tagged: TaggedTerm) {
        let key = tagged.term().as_str().to_string();
        if let Some(old) = self.terms.remove(&key) {
            for (label, value) in axis_values(&old) {
                if let Some(set) = self.by_axis.get_mut(&(label, value)) {
                    set.remove(&key);
                }
            }
        }
        for (label, value) in axis_values(&tagged) {
            self.by_axis.entry((label, value)).or_default().insert(key.clone());
        }
        self.terms.insert(key, tagged);
    }

    pub fn get(&self, term: &str) -> Option<&TaggedTerm> {
        self.terms.get(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TaggedTerm> {
        self.terms.values()
    }

    /// Terms whose `label` axis value (leftmost span) equals `value`.
    pub fn terms_with(&self, label: AxisLabel, value: &str) -> impl Iterator<Item = &TaggedTerm> {
        self.by_axis
            .get(&(label, value.to_string()))
            .into_iter()
            .flatten()
            .map(|k| &self.terms[k])
    }

    /// Other terms that agree with `tagged` on at least one axis value,
    /// in ascending text order.
    pub fn sharing_any_axis(&self, tagged: &TaggedTerm) -> Vec<&TaggedTerm> {
        let mut keys: BTreeSet<&str> = BTreeSet::new();
        for (label, value) in axis_values(tagged) {
            if let Some(set) = self.by_axis.get(&(label, value)) {
                keys.extend(set.iter().map(String::as_str));
            }
        }
        keys.remove(tagged.term().as_str());
        keys.into_iter().map(|k| &self.terms[k]).collect()
    }
}

fn axis_values(t: &TaggedTerm) -> Vec<(AxisLabel, String)> {
    AxisLabel::ALL
        .into_iter()
        .filter_map(|l| t.axis_value(l).map(|v| (l, v)))
        .collect()
}
