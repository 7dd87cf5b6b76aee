use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_lines, Format};
use crate::error::{Error, Result};
use crate::text::{normalize, TermText};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Granularity {
    FourDigit,
    SixDigit,
}

impl Granularity {
    /// Codes with at most four alphanumeric characters ("A18.2") are coarse
    /// categories; anything longer ("A18.201") is a fine-grained leaf.
    pub fn of_code(code: &str) -> Self {
        if code.chars().filter(|c| c.is_alphanumeric()).count() <= 4 {
            Granularity::FourDigit
        } else {
            Granularity::SixDigit
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IcdEntry {
    pub code: String,
    pub name: TermText,
    pub granularity: Granularity,
}

impl IcdEntry {
    pub fn new(code: &str, name: &str) -> Result<Self> {
        let code = normalize(code);
        Ok(IcdEntry {
            granularity: Granularity::of_code(&code),
            name: TermText::new(name)?,
            code,
        })
    }
}

#[derive(Deserialize, Serialize)]
struct IcdRecord {
    code: String,
    name: String,
}

/// A coded disease vocabulary with its code-prefix hierarchy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IcdVocabulary {
    by_code: BTreeMap<String, IcdEntry>,
    children: BTreeMap<String, Vec<String>>,
    by_name: BTreeMap<String, BTreeSet<String>>,
}

impl IcdVocabulary {
    /// Builds a vocabulary; fails on the first repeated code.
    pub fn from_entries(entries: impl IntoIterator<Item = IcdEntry>) -> Result<Self> {
        let mut vocab = IcdVocabulary::default();
        for (i, entry) in entries.into_iter().enumerate() {
            if vocab.by_code.contains_key(&entry.code) {
                return Err(Error::DuplicateCode {
                    path: "<memory>".into(),
                    line: i + 1,
                    code: entry.code,
                });
            }
            vocab.by_code.insert(entry.code.clone(), entry);
        }
        vocab.index();
        Ok(vocab)
    }

    fn index(&mut self) {
        self.children.clear();
        self.by_name.clear();
        for entry in self.by_code.values() {
            self.by_name
                .entry(entry.name.as_str().to_string())
                .or_default()
                .insert(entry.code.clone());
            if entry.granularity == Granularity::FourDigit {
                self.children.entry(entry.code.clone()).or_default();
            }
        }
        let six: Vec<&IcdEntry> = self
            .by_code
            .values()
            .filter(|e| e.granularity == Granularity::SixDigit)
            .collect();
        for entry in six {
            for (idx, _) in entry.code.char_indices().skip(1) {
                let prefix = &entry.code[..idx];
                if let Some(kids) = self.children.get_mut(prefix) {
                    kids.push(entry.code.clone());
                }
            }
        }
        // by_code iteration is ordered, so each child list is already ascending
    }

    pub fn len(&self) -> usize {
        self.by_code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_code.is_empty()
    }

    /// Entries in ascending code order.
    pub fn entries(&self) -> impl Iterator<Item = &IcdEntry> {
        self.by_code.values()
    }

    pub fn get(&self, code: &str) -> Option<&IcdEntry> {
        self.by_code.get(code)
    }

    /// Codes carrying exactly this name.
    pub fn codes_for_name(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.by_name.get(name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    /// Coarse (four-digit) entries in ascending code order.
    pub fn four_digit(&self) -> impl Iterator<Item = &IcdEntry> {
        self.by_code
            .values()
            .filter(|e| e.granularity == Granularity::FourDigit)
    }

    /// Fine-grained entries whose code starts with `code4`, ascending.
    ///
    /// An unknown or non-coarse code yields an empty list and a warning.
    pub fn children_of(&self, code4: &str) -> Vec<&IcdEntry> {
        match self.children.get(code4) {
            Some(kids) => kids.iter().map(|c| &self.by_code[c]).collect(),
            None => {
                log::warn!("children_of: `{code4}` is not a four-digit code in the vocabulary");
                Vec::new()
            }
        }
    }

    /// Longest four-digit code that prefixes `code`.
    pub fn parent_of(&self, code: &str) -> Option<&IcdEntry> {
        code.char_indices()
            .skip(1)
            .map(|(i, _)| &code[..i])
            .filter(|p| self.children.contains_key(*p))
            .last()
            .map(|p| &self.by_code[p])
    }
}

pub fn load_icd(path: impl AsRef<Path>, format: Format) -> Result<IcdVocabulary> {
    let path = path.as_ref();
    let mut by_code = BTreeMap::new();
    for (line_no, line) in read_lines(path)? {
        let record = match format {
            Format::Tsv => {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(Error::malformed(
                        path,
                        line_no,
                        format!("expected `code<TAB>name`, found {} field(s)", fields.len()),
                    ));
                }
                IcdRecord {
                    code: fields[0].to_string(),
                    name: fields[1].to_string(),
                }
            }
            Format::Jsonl => serde_json::from_str::<IcdRecord>(&line)
                .map_err(|e| Error::malformed(path, line_no, e.to_string()))?,
        };
        let code = normalize(&record.code);
        if code.is_empty() {
            return Err(Error::EmptyField {
                path: path.into(),
                line: line_no,
                field: "code",
            });
        }
        let name = TermText::new(&record.name).map_err(|_| Error::EmptyField {
            path: path.into(),
            line: line_no,
            field: "name",
        })?;
        if by_code.contains_key(&code) {
            return Err(Error::DuplicateCode {
                path: path.into(),
                line: line_no,
                code,
            });
        }
        let entry = IcdEntry {
            granularity: Granularity::of_code(&code),
            code: code.clone(),
            name,
        };
        by_code.insert(code, entry);
    }
    let mut vocab = IcdVocabulary {
        by_code,
        ..Default::default()
    };
    vocab.index();
    Ok(vocab)
}

pub fn write_icd(vocab: &IcdVocabulary, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for entry in vocab.entries() {
        match format {
            Format::Tsv => {
                out.push_str(&entry.code);
                out.push('\t');
                out.push_str(entry.name.as_str());
            }
            Format::Jsonl => {
                let record = IcdRecord {
                    code: entry.code.clone(),
                    name: entry.name.as_str().to_string(),
                };
                out.push_str(&serde_json::to_string(&record).expect("plain record serializes"));
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tsv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn granularity_from_code_shape() {
        let f = tsv("A18.2\t外周结核性淋巴结炎\nA18.201\t腹股沟淋巴结结核\n");
        let vocab = load_icd(f.path(), Format::Tsv).unwrap();
        assert_eq!(vocab.get("A18.2").unwrap().granularity, Granularity::FourDigit);
        let child = vocab.get("A18.201").unwrap();
        assert_eq!(child.granularity, Granularity::SixDigit);
        assert_eq!(vocab.parent_of("A18.201").unwrap().code, "A18.2");
    }

    #[test]
    fn ten_children_of_a18_2() {
        let mut src = String::from("A18.2\t外周结核性淋巴结炎\n");
        for i in (1..=10).rev() {
            src.push_str(&format!("A18.2{i:02}\t淋巴结结核{i}\n"));
        }
        let vocab = load_icd(tsv(&src).path(), Format::Tsv).unwrap();
        let kids: Vec<&str> = vocab.children_of("A18.2").iter().map(|e| e.code.as_str()).collect();
        assert_eq!(kids.len(), 10);
        assert_eq!(kids.first(), Some(&"A18.201"));
        assert_eq!(kids.last(), Some(&"A18.210"));
    }

    #[test]
    fn children_match_prefix_scan() {
        let src = "A18.2\tp\nA18.201\ta\nA18.202\tb\nB20.101\tc\nB20.1\td\n";
        let vocab = load_icd(tsv(src).path(), Format::Tsv).unwrap();
        let got: Vec<&str> = vocab.children_of("A18.2").iter().map(|e| e.code.as_str()).collect();
        let brute: Vec<&str> = vocab
            .entries()
            .filter(|e| e.granularity == Granularity::SixDigit && e.code.starts_with("A18.2"))
            .map(|e| e.code.as_str())
            .collect();
        assert_eq!(got, brute);
        assert_eq!(got, vec!["A18.201", "A18.202"]);
    }

    #[test]
    fn no_children_and_unknown_code() {
        let vocab = load_icd(tsv("A18.2\tp\n").path(), Format::Tsv).unwrap();
        assert!(vocab.children_of("A18.2").is_empty());
        assert!(vocab.children_of("Z99.9").is_empty());
    }

    #[test]
    fn empty_file() {
        let vocab = load_icd(tsv("").path(), Format::Tsv).unwrap();
        assert!(vocab.is_empty());
        assert_eq!(vocab.four_digit().count(), 0);
    }

    #[test]
    fn rejects_bad_records() {
        let err = load_icd(tsv("A18.2\tx\nA18.2\ty\n").path(), Format::Tsv).unwrap_err();
        assert!(matches!(err, Error::DuplicateCode { line: 2, .. }), "{err}");
        let err = load_icd(tsv("A18.2\tx\nA18.3\n").path(), Format::Tsv).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
        let err = load_icd(tsv("A18.2\t  \n").path(), Format::Tsv).unwrap_err();
        assert!(matches!(err, Error::EmptyField { field: "name", .. }), "{err}");
        let err = load_icd(tsv("{\"code\": \"A1\"}\n").path(), Format::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 1, .. }), "{err}");
    }

    #[test]
    fn round_trip_both_formats() {
        let src = "A18.2\t外周结核性淋巴结炎\nA18.201\t腹股沟淋巴结结核\nA18.202\t颌下淋巴结结核\n";
        let vocab = load_icd(tsv(src).path(), Format::Tsv).unwrap();
        for format in [Format::Tsv, Format::Jsonl] {
            let out = tempfile::NamedTempFile::new().unwrap();
            write_icd(&vocab, out.path(), format).unwrap();
            assert_eq!(load_icd(out.path(), format).unwrap(), vocab);
        }
    }
}
