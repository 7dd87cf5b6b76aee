use std::collections::BTreeSet;
use std::path::Path;

use super::read_lines;
use crate::error::{Error, Result};
use crate::tagger::AxisLabel;
use crate::text::normalize;

/// Known axis words, one set per axis class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxisLexicons {
    pub centers: BTreeSet<String>,
    pub regions: BTreeSet<String>,
    pub characteristics: BTreeSet<String>,
}

impl AxisLexicons {
    pub fn new<I, S>(centers: I, regions: I, characteristics: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let clean = |it: I| -> BTreeSet<String> {
            it.into_iter()
                .map(|s| normalize(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect()
        };
        AxisLexicons {
            centers: clean(centers),
            regions: clean(regions),
            characteristics: clean(characteristics),
        }
    }

    pub fn load(centers: &Path, regions: &Path, characteristics: &Path) -> Result<Self> {
        Ok(AxisLexicons {
            centers: load_lexicon_file(centers)?,
            regions: load_lexicon_file(regions)?,
            characteristics: load_lexicon_file(characteristics)?,
        })
    }

    pub fn get(&self, label: AxisLabel) -> &BTreeSet<String> {
        match label {
            AxisLabel::Center => &self.centers,
            AxisLabel::Region => &self.regions,
            AxisLabel::Characteristic => &self.characteristics,
        }
    }

    /// Tagging needs every class populated.
    pub fn validate_for_tagging(&self) -> Result<()> {
        for label in AxisLabel::ALL {
            if self.get(label).is_empty() {
                return Err(Error::Config(format!("{label:?} lexicon is empty")));
            }
        }
        Ok(())
    }
}

/// One entry per line; blank lines are skipped.
pub fn load_lexicon_file(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    Ok(read_lines(path.as_ref())?
        .into_iter()
        .map(|(_, line)| normalize(&line))
        .filter(|s| !s.is_empty())
        .collect())
}
