//! Normalized term text with code-point indexing.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A disease-name string, NFKC-normalized and trimmed, indexed by code point.
///
/// All offsets and lengths exposed by this type count Unicode scalar values,
/// never bytes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermText {
    raw: String,
    chars: Vec<char>,
}

impl TermText {
    pub fn new(text: &str) -> Result<Self> {
        let raw: String = normalize(text);
        if raw.is_empty() {
            return Err(Error::EmptyTerm);
        }
        let chars = raw.chars().collect();
        Ok(TermText { raw, chars })
    }

    pub(crate) fn from_chars(chars: Vec<char>) -> Result<Self> {
        TermText::new(&chars.iter().collect::<String>())
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Length in code points.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Substring over the code-point range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> String {
        self.chars[start..end].iter().collect()
    }

    /// Code-point offset of the leftmost occurrence of `needle`.
    pub fn find(&self, needle: &[char]) -> Option<usize> {
        if needle.is_empty() || needle.len() > self.chars.len() {
            return None;
        }
        self.chars.windows(needle.len()).position(|w| w == needle)
    }
}

/// NFKC-normalize and trim a string.
pub fn normalize(text: &str) -> String {
    text.nfkc().collect::<String>().trim().to_string()
}

impl fmt::Display for TermText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl fmt::Debug for TermText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.raw)
    }
}

impl std::str::FromStr for TermText {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TermText::new(s)
    }
}

impl Serialize for TermText {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.raw)
    }
}

impl<'de> Deserialize<'de> for TermText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        TermText::new(&s).map_err(serde::de::Error::custom)
    }
}
