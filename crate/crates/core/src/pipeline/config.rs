//! Run configuration, read from a TOML file and overridable from the
//! command line. Relative paths in the file resolve against the file's
//! directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{AugConfig, DEFAULT_MAX_PAIRS_PER_SOURCE};
use crate::error::{Error, Result};
use crate::filter::{EmbedderChoice, FilterConfig, NgmMode, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_DIMENSION};
use crate::store::{Format, Provenance, DEFAULT_GOLD_DELIMITER};
use crate::tagger::AxisLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPaths {
    pub icd: PathBuf,
    #[serde(default)]
    pub icd_format: Format,
    #[serde(default)]
    pub region_tree: Option<PathBuf>,
    pub centers: PathBuf,
    pub regions: PathBuf,
    pub characteristics: PathBuf,
    pub task_pairs: PathBuf,
    #[serde(default)]
    pub task_format: Format,
    #[serde(default = "default_delimiter")]
    pub gold_delimiter: String,
    #[serde(default)]
    pub pretagged: Option<PathBuf>,
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
}

fn default_delimiter() -> String {
    DEFAULT_GOLD_DELIMITER.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AugmentSection {
    methods: Vec<String>,
    axes: Vec<String>,
    max_pairs_per_source: usize,
}

impl Default for AugmentSection {
    fn default() -> Self {
        AugmentSection {
            methods: Provenance::GENERATED.iter().map(|p| p.to_string()).collect(),
            axes: vec!["center".into(), "region".into(), "characteristic".into()],
            max_pairs_per_source: DEFAULT_MAX_PAIRS_PER_SOURCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FilterSection {
    alpha: f64,
    beta: f64,
    ngm_mode: NgmMode,
    embedding_dim: usize,
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            ngm_mode: NgmMode::Multiset,
            embedding_dim: DEFAULT_DIMENSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default = "default_output_format")]
    pub format: Format,
}

fn default_output_format() -> Format {
    Format::Jsonl
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    workers: Option<usize>,
    inputs: InputPaths,
    #[serde(default)]
    augment: AugmentSection,
    #[serde(default)]
    filter: FilterSection,
    output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: InputPaths,
    pub augment: AugConfig,
    pub filter: FilterConfig,
    pub output: OutputConfig,
    pub workers: Option<usize>,
}

/// Parses a comma-separated method list such as `ar1,mga-code`.
/// An empty string disables every method.
pub fn parse_methods(list: &str) -> Result<BTreeSet<Provenance>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<Provenance>() {
            Ok(Provenance::Original) | Err(_) => Err(Error::Config(format!(
                "unknown method `{s}` (expected ar1, ar2, mga-code, mga-region)"
            ))),
            Ok(p) => Ok(p),
        })
        .collect()
}

fn parse_axes(axes: &[String]) -> Result<BTreeSet<AxisLabel>> {
    axes.iter()
        .map(|a| AxisLabel::parse(a).ok_or_else(|| Error::Config(format!("unknown axis `{a}`"))))
        .collect()
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let mut inputs = file.inputs;
        inputs.icd = resolve(inputs.icd);
        inputs.region_tree = inputs.region_tree.map(resolve);
        inputs.centers = resolve(inputs.centers);
        inputs.regions = resolve(inputs.regions);
        inputs.characteristics = resolve(inputs.characteristics);
        inputs.task_pairs = resolve(inputs.task_pairs);
        inputs.pretagged = inputs.pretagged.map(resolve);
        inputs.embeddings = inputs.embeddings.map(resolve);

        let embedder = match &inputs.embeddings {
            Some(path) => EmbedderChoice::File { path: path.clone() },
            None => EmbedderChoice::Hashed {
                dimension: file.filter.embedding_dim,
            },
        };
        let cfg = PipelineConfig {
            augment: AugConfig {
                enabled_methods: parse_methods(&file.augment.methods.join(","))?,
                axes_for_replacement: parse_axes(&file.augment.axes)?,
                max_pairs_per_source: file.augment.max_pairs_per_source,
                rng_seed: file.seed,
            },
            filter: FilterConfig {
                alpha: file.filter.alpha,
                beta: file.filter.beta,
                ngm_mode: file.filter.ngm_mode,
                embedder,
            },
            output: OutputConfig {
                dir: resolve(file.output.dir),
                format: file.output.format,
            },
            workers: file.workers,
            inputs,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn seed(&self) -> u64 {
        self.augment.rng_seed
    }

    pub fn validate(&self) -> Result<()> {
        self.augment.validate()?;
        self.filter.validate()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.inputs.gold_delimiter.is_empty() {
            return Err(Error::Config("gold_delimiter must not be empty".into()));
        }
        Ok(())
    }
}
