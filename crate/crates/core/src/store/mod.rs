//! Loaders for the external knowledge sources: coded vocabulary, region
//! tree, axis-word lexicons and the seed normalization pairs.
//!
//! Every store is immutable once built and can be shared across threads.

mod icd;
mod lexicon;
mod pairs;
mod region;

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use icd::{load_icd, write_icd, Granularity, IcdEntry, IcdVocabulary};
pub use lexicon::{load_lexicon_file, AxisLexicons};
pub use pairs::{canonical_sort, load_task_pairs, NormPair, PairScores, Provenance, DEFAULT_GOLD_DELIMITER};
pub use region::{load_region_tree, RegionTree};

use crate::error::{Error, Result};

/// On-disk record format shared by the loaders and the dataset writer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "jsonl" | "json" => Ok(Format::Jsonl),
            other => Err(Error::Config(format!("unknown format `{other}` (expected tsv or jsonl)"))),
        }
    }
}

/// Yields `(1-based line number, line)` for every non-blank line.
pub(crate) fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line.to_string()));
    }
    Ok(out)
}
