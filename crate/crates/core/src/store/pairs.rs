use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{read_lines, Format};
use crate::error::{Error, Result};
use crate::text::TermText;

pub const DEFAULT_GOLD_DELIMITER: &str = "##";

/// Where a pair came from. Declaration order is the canonical output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "ar1")]
    Ar1,
    #[serde(rename = "ar2")]
    Ar2,
    #[serde(rename = "mga-code")]
    MgaCode,
    #[serde(rename = "mga-region")]
    MgaRegion,
}

impl Provenance {
    pub const ALL: [Provenance; 5] = [
        Provenance::Original,
        Provenance::Ar1,
        Provenance::Ar2,
        Provenance::MgaCode,
        Provenance::MgaRegion,
    ];

    pub const GENERATED: [Provenance; 4] = [
        Provenance::Ar1,
        Provenance::Ar2,
        Provenance::MgaCode,
        Provenance::MgaRegion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Ar1 => "ar1",
            Provenance::Ar2 => "ar2",
            Provenance::MgaCode => "mga-code",
            Provenance::MgaRegion => "mga-region",
        }
    }

    /// Higher wins when duplicates collapse.
    pub fn priority(self) -> u8 {
        match self {
            Provenance::Original => 4,
            Provenance::Ar2 => 3,
            Provenance::Ar1 => 2,
            Provenance::MgaCode => 1,
            Provenance::MgaRegion => 0,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Provenance::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown provenance `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScores {
    pub ngm: f64,
    pub cos: f64,
}

/// An (unnormalized, standard) disease-name pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NormPair {
    pub unnormalized: TermText,
    pub standard: TermText,
    pub standard_code: Option<String>,
    pub provenance: Provenance,
    pub scores: Option<PairScores>,
}

impl NormPair {
    pub fn new(
        unnormalized: TermText,
        standard: TermText,
        standard_code: Option<String>,
        provenance: Provenance,
    ) -> Self {
        NormPair {
            unnormalized,
            standard,
            standard_code,
            provenance,
            scores: None,
        }
    }

    /// Convenience constructor for original pairs from raw strings.
    pub fn original(unnormalized: &str, standard: &str) -> Result<Self> {
        Ok(NormPair::new(
            TermText::new(unnormalized)?,
            TermText::new(standard)?,
            None,
            Provenance::Original,
        ))
    }

    pub fn key(&self) -> (&str, &str) {
        (self.unnormalized.as_str(), self.standard.as_str())
    }

    /// Output order: provenance, then unnormalized, standard and code.
    pub fn canonical_cmp(&self, other: &NormPair) -> std::cmp::Ordering {
        (self.provenance, self.unnormalized.as_str(), self.standard.as_str(), &self.standard_code).cmp(&(
            other.provenance,
            other.unnormalized.as_str(),
            other.standard.as_str(),
            &other.standard_code,
        ))
    }
}

pub fn canonical_sort(pairs: &mut [NormPair]) {
    pairs.sort_by(NormPair::canonical_cmp);
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn split(self, delimiter: &str) -> Vec<String> {
        match self {
            OneOrMany::One(s) => s.split(delimiter).map(str::to_string).collect(),
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Deserialize)]
struct TaskRecord {
    unnormalized: String,
    standard: OneOrMany,
    #[serde(default)]
    code: Option<OneOrMany>,
}

/// Loads seed normalization pairs, fanning multi-gold records out into one
/// pair per gold standard.
pub fn load_task_pairs(path: impl AsRef<Path>, format: Format, delimiter: &str) -> Result<Vec<NormPair>> {
    let path = path.as_ref();
    if delimiter.is_empty() {
        return Err(Error::Config("gold delimiter must not be empty".into()));
    }
    let mut out = Vec::new();
    for (line_no, line) in read_lines(path)? {
        let (unnormalized, golds, codes) = match format {
            Format::Tsv => {
                let fields: Vec<&str> = line.split('\t').collect();
                if !(2..=3).contains(&fields.len()) {
                    return Err(Error::malformed(
                        path,
                        line_no,
                        format!("expected `unnormalized<TAB>standard[<TAB>code]`, found {} field(s)", fields.len()),
                    ));
                }
                let codes = fields
                    .get(2)
                    .map(|c| c.split(delimiter).map(str::to_string).collect::<Vec<_>>());
                (
                    fields[0].to_string(),
                    fields[1].split(delimiter).map(str::to_string).collect::<Vec<_>>(),
                    codes,
                )
            }
            Format::Jsonl => {
                let rec: TaskRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
                (
                    rec.unnormalized,
                    rec.standard.split(delimiter),
                    rec.code.map(|c| c.split(delimiter)),
                )
            }
        };

        let empty = |field| Error::EmptyField {
            path: path.into(),
            line: line_no,
            field,
        };
        let unnormalized = TermText::new(&unnormalized).map_err(|_| empty("unnormalized"))?;
        if let Some(codes) = &codes {
            if codes.len() != golds.len() {
                return Err(Error::malformed(
                    path,
                    line_no,
                    format!("{} standard name(s) but {} code(s)", golds.len(), codes.len()),
                ));
            }
        }
        for (i, gold) in golds.iter().enumerate() {
            let standard = TermText::new(gold).map_err(|_| empty("standard"))?;
            if standard.as_str().chars().any(|c| delimiter.contains(c)) {
                return Err(Error::UndeclaredDelimiter {
                    path: path.into(),
                    line: line_no,
                    value: standard.to_string(),
                    delimiter: delimiter.to_string(),
                });
            }
            let code = codes
                .as_ref()
                .map(|c| c[i].trim().to_string())
                .filter(|c| !c.is_empty());
            out.push(NormPair::new(unnormalized.clone(), standard, code, Provenance::Original));
        }
    }
    Ok(out)
}
