//! Axis-word tagging: locating disease centers, anatomical regions and
//! disease characteristics inside a name.
//!
//! The default [`LexiconTagger`] does greedy maximal matching against the
//! axis lexicons. Anything implementing [`AxisTagger`] can replace it, and
//! [`PretaggedTagger`] serves spans produced by an external NER model.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::AxisLexicons;
use crate::text::TermText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisLabel {
    #[serde(alias = "CEN", alias = "Center")]
    Center,
    #[serde(alias = "REG", alias = "Region")]
    Region,
    #[serde(alias = "CHAR", alias = "Characteristic")]
    Characteristic,
}

impl AxisLabel {
    pub const ALL: [AxisLabel; 3] = [AxisLabel::Center, AxisLabel::Region, AxisLabel::Characteristic];

    /// Suffix used in BIO tags.
    pub fn bio_suffix(self) -> &'static str {
        match self {
            AxisLabel::Center => "CEN",
            AxisLabel::Region => "REG",
            AxisLabel::Characteristic => "CHAR",
        }
    }

    pub fn parse(s: &str) -> Option<AxisLabel> {
        match s.trim().to_ascii_lowercase().as_str() {
            "center" | "cen" => Some(AxisLabel::Center),
            "region" | "reg" => Some(AxisLabel::Region),
            "characteristic" | "char" => Some(AxisLabel::Characteristic),
            _ => None,
        }
    }
}

/// Half-open code-point range `[start, end)` carrying an axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AxisSpan {
    pub start: usize,
    pub end: usize,
    pub label: AxisLabel,
}

impl AxisSpan {
    pub fn new(start: usize, end: usize, label: AxisLabel) -> Self {
        AxisSpan { start, end, label }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    fn overlaps(&self, other: &AxisSpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// A term plus its sorted, pairwise non-overlapping axis spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedTerm {
    term: TermText,
    spans: Vec<AxisSpan>,
}

impl TaggedTerm {
    /// Validates bounds and overlap; spans are sorted by start.
    pub fn new(term: TermText, mut spans: Vec<AxisSpan>) -> Result<Self> {
        spans.sort();
        for span in &spans {
            if span.is_empty() || span.end > term.len() {
                return Err(Error::InvalidSpan {
                    start: span.start,
                    end: span.end,
                    len: term.len(),
                });
            }
        }
        for w in spans.windows(2) {
            if w[0].overlaps(&w[1]) {
                return Err(Error::InvalidSpan {
                    start: w[1].start,
                    end: w[1].end,
                    len: term.len(),
                });
            }
        }
        Ok(TaggedTerm { term, spans })
    }

    pub fn untagged(term: TermText) -> Self {
        TaggedTerm { term, spans: Vec::new() }
    }

    pub fn term(&self) -> &TermText {
        &self.term
    }

    pub fn spans(&self) -> &[AxisSpan] {
        &self.spans
    }

    /// Leftmost span with the given label.
    pub fn axis_span(&self, label: AxisLabel) -> Option<&AxisSpan> {
        self.spans.iter().find(|s| s.label == label)
    }

    /// Text under the leftmost span with the given label.
    pub fn axis_value(&self, label: AxisLabel) -> Option<String> {
        self.axis_span(label).map(|s| self.term.slice(s.start, s.end))
    }
}

pub fn axis_value(tagged: &TaggedTerm, label: AxisLabel) -> Option<String> {
    tagged.axis_value(label)
}

pub trait AxisTagger: Send + Sync {
    fn tag(&self, term: &TermText) -> TaggedTerm;
}

/// Greedy maximal-match tagger over the axis lexicons.
///
/// All lexicon hits are collected, then accepted longest first; equal
/// lengths go to the lower start offset. A hit overlapping an accepted one
/// is discarded. When one string appears in several lexicons the label
/// order Center, Region, Characteristic decides.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    dict: HashMap<Vec<char>, AxisLabel>,
    max_len: usize,
}

impl LexiconTagger {
    pub fn new(lexicons: &AxisLexicons) -> Self {
        let mut dict = HashMap::new();
        for label in AxisLabel::ALL {
            for word in lexicons.get(label) {
                dict.entry(word.chars().collect::<Vec<_>>()).or_insert(label);
            }
        }
        let max_len = dict.keys().map(Vec::len).max().unwrap_or(0);
        LexiconTagger { dict, max_len }
    }
}

impl AxisTagger for LexiconTagger {
    fn tag(&self, term: &TermText) -> TaggedTerm {
        let chars = term.chars();
        let mut hits = Vec::new();
        for start in 0..chars.len() {
            let longest = self.max_len.min(chars.len() - start);
            for len in 1..=longest {
                if let Some(&label) = self.dict.get(&chars[start..start + len]) {
                    hits.push(AxisSpan::new(start, start + len, label));
                }
            }
        }
        hits.sort_by(|a, b| b.len().cmp(&a.len()).then(a.start.cmp(&b.start)));

        let mut taken = vec![false; chars.len()];
        let mut spans = Vec::new();
        for hit in hits {
            if taken[hit.start..hit.end].iter().any(|&t| t) {
                continue;
            }
            taken[hit.start..hit.end].iter_mut().for_each(|t| *t = true);
            spans.push(hit);
        }
        spans.sort();
        TaggedTerm {
            term: term.clone(),
            spans,
        }
    }
}

#[derive(Deserialize)]
struct PretaggedRecord {
    term: String,
    #[serde(default)]
    spans: Vec<AxisSpan>,
}

/// Serves spans read from a JSONL file (`{"term": ..., "spans": [...]}`),
/// deferring to a fallback tagger for terms the file does not cover.
pub struct PretaggedTagger {
    tagged: HashMap<String, TaggedTerm>,
    fallback: Option<Box<dyn AxisTagger>>,
}

impl PretaggedTagger {
    pub fn load(path: impl AsRef<Path>, fallback: Option<Box<dyn AxisTagger>>) -> Result<Self> {
        let path = path.as_ref();
        let mut tagged = HashMap::new();
        for (line_no, line) in crate::store::read_lines(path)? {
            let rec: PretaggedRecord =
                serde_json::from_str(&line).map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
            let term = TermText::new(&rec.term).map_err(|_| Error::EmptyField {
                path: path.into(),
                line: line_no,
                field: "term",
            })?;
            let t = TaggedTerm::new(term, rec.spans)
                .map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
            tagged.insert(t.term().as_str().to_string(), t);
        }
        Ok(PretaggedTagger { tagged, fallback })
    }

    pub fn len(&self) -> usize {
        self.tagged.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tagged.is_empty()
    }
}

impl AxisTagger for PretaggedTagger {
    fn tag(&self, term: &TermText) -> TaggedTerm {
        if let Some(t) = self.tagged.get(term.as_str()) {
            return t.clone();
        }
        match &self.fallback {
            Some(inner) => inner.tag(term),
            None => TaggedTerm::untagged(term.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BioTag {
    Begin(AxisLabel),
    Inside(AxisLabel),
    Outside,
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::Begin(l) => write!(f, "B-{}", l.bio_suffix()),
            BioTag::Inside(l) => write!(f, "I-{}", l.bio_suffix()),
            BioTag::Outside => f.write_str("O"),
        }
    }
}

impl std::str::FromStr for BioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(BioTag::Outside);
        }
        let bad = || Error::Config(format!("bad BIO tag `{s}`"));
        let (prefix, label) = s.split_once('-').ok_or_else(bad)?;
        let label = AxisLabel::parse(label).ok_or_else(bad)?;
        match prefix {
            "B" => Ok(BioTag::Begin(label)),
            "I" => Ok(BioTag::Inside(label)),
            _ => Err(bad()),
        }
    }
}

/// One character-level tag per code point.
pub fn spans_to_bio(tagged: &TaggedTerm) -> Vec<BioTag> {
    let mut tags = vec![BioTag::Outside; tagged.term.len()];
    for span in &tagged.spans {
        tags[span.start] = BioTag::Begin(span.label);
        for tag in &mut tags[span.start + 1..span.end] {
            *tag = BioTag::Inside(span.label);
        }
    }
    tags
}

/// Inverse of [`spans_to_bio`]. An `I-` tag that does not continue a span of
/// the same label opens a new one.
pub fn bio_to_spans(term: TermText, tags: &[BioTag]) -> Result<TaggedTerm> {
    if tags.len() != term.len() {
        return Err(Error::LengthMismatch {
            left: term.len(),
            right: tags.len(),
        });
    }
    let mut spans: Vec<AxisSpan> = Vec::new();
    let mut open: Option<AxisSpan> = None;
    for (i, tag) in tags.iter().enumerate() {
        match *tag {
            BioTag::Inside(l) if open.is_some_and(|s| s.label == l) => {
                open.as_mut().unwrap().end = i + 1;
            }
            BioTag::Begin(l) | BioTag::Inside(l) => {
                spans.extend(open.take());
                open = Some(AxisSpan::new(i, i + 1, l));
            }
            BioTag::Outside => spans.extend(open.take()),
        }
    }
    spans.extend(open);
    TaggedTerm::new(term, spans)
}
