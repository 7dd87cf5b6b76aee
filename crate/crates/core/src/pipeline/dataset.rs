//! Reading and writing generated datasets.
//!
//! Both formats carry the same six columns: unnormalized, standard,
//! standard_code, provenance, ngm, cos. Missing values are `null` in JSONL
//! and empty cells in TSV. Files are UTF-8 with LF line endings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{Format, NormPair, PairScores, Provenance};
use crate::text::TermText;

#[derive(Serialize, Deserialize)]
struct Record {
    unnormalized: String,
    standard: String,
    standard_code: Option<String>,
    provenance: Provenance,
    ngm: Option<f64>,
    cos: Option<f64>,
}

impl From<&NormPair> for Record {
    fn from(p: &NormPair) -> Self {
        Record {
            unnormalized: p.unnormalized.to_string(),
            standard: p.standard.to_string(),
            standard_code: p.standard_code.clone(),
            provenance: p.provenance,
            ngm: p.scores.map(|s| s.ngm),
            cos: p.scores.map(|s| s.cos),
        }
    }
}

pub fn render_dataset(pairs: &[NormPair], format: Format) -> String {
    let mut out = String::new();
    for pair in pairs {
        let rec = Record::from(pair);
        match format {
            Format::Jsonl => out.push_str(&serde_json::to_string(&rec).expect("record serializes")),
            Format::Tsv => {
                let num = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                let cells = [
                    rec.unnormalized,
                    rec.standard,
                    rec.standard_code.unwrap_or_default(),
                    rec.provenance.to_string(),
                    num(rec.ngm),
                    num(rec.cos),
                ];
                out.push_str(&cells.join("\t"));
            }
        }
        out.push('\n');
    }
    out
}

/// Writes pairs in the order given.
pub fn write_dataset(pairs: &[NormPair], path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_dataset(pairs, format)).map_err(|e| Error::io(path, e))
}

/// Reads a dataset file. TSV rows may omit trailing columns; a missing
/// provenance reads as `original`.
pub fn read_dataset(path: impl AsRef<Path>, format: Format) -> Result<Vec<NormPair>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for (line_no, line) in crate::store::read_lines(path)? {
        let rec = match format {
            Format::Jsonl => serde_json::from_str::<Record>(&line)
                .map_err(|e| Error::malformed(path, line_no, e.to_string()))?,
            Format::Tsv => {
                let cells: Vec<&str> = line.split('\t').collect();
                if !(2..=6).contains(&cells.len()) {
                    return Err(Error::malformed(path, line_no, format!("expected 2 to 6 columns, found {}", cells.len())));
                }
                let cell = |i: usize| cells.get(i).copied().filter(|c| !c.is_empty());
                let num = |i: usize| -> Result<Option<f64>> {
                    cell(i)
                        .map(|c| c.parse::<f64>().map_err(|e| Error::malformed(path, line_no, e.to_string())))
                        .transpose()
                };
                Record {
                    unnormalized: cells[0].to_string(),
                    standard: cells[1].to_string(),
                    standard_code: cell(2).map(str::to_string),
                    provenance: match cell(3) {
                        Some(p) => p.parse().map_err(|_| Error::malformed(path, line_no, format!("unknown provenance `{p}`")))?,
                        None => Provenance::Original,
                    },
                    ngm: num(4)?,
                    cos: num(5)?,
                }
            }
        };
        let empty = |field| Error::EmptyField {
            path: path.into(),
            line: line_no,
            field,
        };
        let scores = match (rec.ngm, rec.cos) {
            (Some(ngm), Some(cos)) => Some(PairScores { ngm, cos }),
            (None, None) => None,
            _ => return Err(Error::malformed(path, line_no, "ngm and cos must be given together")),
        };
        out.push(NormPair {
            unnormalized: TermText::new(&rec.unnormalized).map_err(|_| empty("unnormalized"))?,
            standard: TermText::new(&rec.standard).map_err(|_| empty("standard"))?,
            standard_code: rec.standard_code,
            provenance: rec.provenance,
            scores,
        });
    }
    Ok(out)
}
