//! End-to-end augmentation run: load, tag, generate, filter, dedupe, sort,
//! write.

mod config;
mod dataset;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use config::{parse_methods, InputPaths, OutputConfig, PipelineConfig};
pub use dataset::{read_dataset, render_dataset, write_dataset};

use crate::augment::{self, TaggedIndex};
use crate::error::{Error, Result};
use crate::filter::{DropReason, SemanticFilter};
use crate::store::{
    canonical_sort, load_icd, load_region_tree, load_task_pairs, AxisLexicons, NormPair, Provenance, RegionTree,
};
use crate::tagger::{AxisTagger, LexiconTagger, PretaggedTagger};

/// Counts for one provenance. `generated = kept + dropped + dedup_removed`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ProvenanceStats {
    pub generated: usize,
    pub kept: usize,
    pub dropped: BTreeMap<DropReason, usize>,
    pub dedup_removed: usize,
}

impl ProvenanceStats {
    pub fn dropped_total(&self) -> usize {
        self.dropped.values().sum()
    }

    pub fn is_conserved(&self) -> bool {
        self.generated == self.kept + self.dropped_total() + self.dedup_removed
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub by_provenance: BTreeMap<Provenance, ProvenanceStats>,
    pub wall_time_secs: f64,
}

impl RunStats {
    pub fn is_conserved(&self) -> bool {
        self.by_provenance.values().all(ProvenanceStats::is_conserved)
    }

    pub fn total_kept(&self) -> usize {
        self.by_provenance.values().map(|s| s.kept).sum()
    }

    /// Plain-text table for terminals.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{:<12} {:>10} {:>10} {:>10} {:>10}\n",
            "provenance", "generated", "kept", "dropped", "dedup"
        );
        for (p, s) in &self.by_provenance {
            out.push_str(&format!(
                "{:<12} {:>10} {:>10} {:>10} {:>10}\n",
                p.as_str(),
                s.generated,
                s.kept,
                s.dropped_total(),
                s.dedup_removed
            ));
            for (reason, n) in &s.dropped {
                out.push_str(&format!("{:<12}   {}: {}\n", "", reason.as_str(), n));
            }
        }
        out.push_str(&format!("wall time: {:.3}s\n", self.wall_time_secs));
        out
    }
}

/// Collapses exact (unnormalized, standard) duplicates, keeping the pair with
/// the highest-priority provenance (first occurrence on ties). Output keeps
/// the order in which each key first appeared.
pub fn dedupe(pairs: Vec<NormPair>) -> Vec<NormPair> {
    dedupe_counted(pairs).0
}

/// [`dedupe`] plus the number of pairs removed per provenance.
pub fn dedupe_counted(pairs: Vec<NormPair>) -> (Vec<NormPair>, BTreeMap<Provenance, usize>) {
    let mut slot: HashMap<(String, String), usize> = HashMap::new();
    let mut kept: Vec<NormPair> = Vec::new();
    let mut removed: BTreeMap<Provenance, usize> = BTreeMap::new();
    for pair in pairs {
        let key = (pair.unnormalized.to_string(), pair.standard.to_string());
        match slot.get(&key) {
            None => {
                slot.insert(key, kept.len());
                kept.push(pair);
            }
            Some(&i) => {
                let loser = if pair.provenance.priority() > kept[i].provenance.priority() {
                    std::mem::replace(&mut kept[i], pair)
                } else {
                    pair
                };
                *removed.entry(loser.provenance).or_insert(0) += 1;
            }
        }
    }
    (kept, removed)
}

/// Files written by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutputs {
    /// Every surviving pair, originals included.
    pub dataset: PathBuf,
    /// Generated pairs only, for pretraining.
    pub augmented: PathBuf,
    /// Seed pairs only, for fine-tuning.
    pub original: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub pairs: Vec<NormPair>,
    pub stats: RunStats,
}

fn build_tagger(cfg: &PipelineConfig) -> Result<Box<dyn AxisTagger>> {
    let inputs = &cfg.inputs;
    let lexicons = AxisLexicons::load(&inputs.centers, &inputs.regions, &inputs.characteristics)?;
    match &inputs.pretagged {
        Some(path) => {
            let fallback: Option<Box<dyn AxisTagger>> = if lexicons.validate_for_tagging().is_ok() {
                Some(Box::new(LexiconTagger::new(&lexicons)))
            } else {
                None
            };
            Ok(Box::new(PretaggedTagger::load(path, fallback)?))
        }
        None => {
            lexicons.validate_for_tagging()?;
            Ok(Box::new(LexiconTagger::new(&lexicons)))
        }
    }
}

/// Runs every stage in memory and returns canonically sorted pairs.
pub fn run_in_memory(cfg: &PipelineConfig) -> Result<RunResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_stages(cfg))
}

fn run_stages(cfg: &PipelineConfig) -> Result<RunResult> {
    let started = Instant::now();
    let inputs = &cfg.inputs;

    let vocab = load_icd(&inputs.icd, inputs.icd_format)?;
    let tree = match &inputs.region_tree {
        Some(path) => load_region_tree(path)?,
        None => RegionTree::default(),
    };
    let task_pairs = load_task_pairs(&inputs.task_pairs, inputs.task_format, &inputs.gold_delimiter)?;
    let tagger = build_tagger(cfg)?;
    let filter = SemanticFilter::from_config(&cfg.filter)?;
    log::info!(
        "loaded {} vocabulary entries, {} regions, {} seed pairs",
        vocab.len(),
        tree.len(),
        task_pairs.len()
    );

    let terms = vocab
        .entries()
        .map(|e| &e.name)
        .chain(task_pairs.iter().flat_map(|p| [&p.unnormalized, &p.standard]));
    let idx = TaggedIndex::build(tagger.as_ref(), terms);

    let generated = augment::generate(&vocab, &idx, &tree, &task_pairs, &cfg.augment);

    let mut stats = RunStats::default();
    stats.by_provenance.entry(Provenance::Original).or_default().generated = task_pairs.len();
    for (prov, pairs) in &generated {
        stats.by_provenance.entry(*prov).or_default().generated = pairs.len();
    }

    let mut candidates = task_pairs;
    candidates.extend(generated.into_values().flatten());
    let outcome = filter.filter_pairs(candidates);
    for (prov, reasons) in &outcome.dropped {
        stats.by_provenance.entry(*prov).or_default().dropped = reasons.clone();
    }

    let (mut pairs, removed) = dedupe_counted(outcome.kept);
    for (prov, n) in removed {
        stats.by_provenance.entry(prov).or_default().dedup_removed = n;
    }
    canonical_sort(&mut pairs);
    for pair in &pairs {
        stats.by_provenance.entry(pair.provenance).or_default().kept += 1;
    }
    stats.wall_time_secs = started.elapsed().as_secs_f64();
    debug_assert!(stats.is_conserved());
    Ok(RunResult { pairs, stats })
}

/// Writes `dataset`, `augmented` and `original` files into `dir`.
pub fn write_outputs(pairs: &[NormPair], dir: &Path, format: crate::store::Format) -> Result<RunOutputs> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ext = format.extension();
    let outputs = RunOutputs {
        dataset: dir.join(format!("dataset.{ext}")),
        augmented: dir.join(format!("augmented.{ext}")),
        original: dir.join(format!("original.{ext}")),
    };
    let (original, augmented): (Vec<NormPair>, Vec<NormPair>) =
        pairs.iter().cloned().partition(|p| p.provenance == Provenance::Original);
    write_dataset(pairs, &outputs.dataset, format)?;
    write_dataset(&augmented, &outputs.augmented, format)?;
    write_dataset(&original, &outputs.original, format)?;
    Ok(outputs)
}

/// Full run: every stage, then the three output files.
pub fn run(cfg: &PipelineConfig) -> Result<(RunOutputs, RunStats)> {
    let result = run_in_memory(cfg)?;
    let outputs = write_outputs(&result.pairs, &cfg.output.dir, cfg.output.format)?;
    Ok((outputs, result.stats))
}
