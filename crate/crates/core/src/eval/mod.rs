//! Evaluation harness: a retrieval normalizer built from seed and/or
//! generated pairs, scored with accuracy, micro-F1, recall@k and NDCG@k.
//!
//! The subsample experiment shrinks the seed set (nested seeded samples) and
//! compares indexes built with and without generated pairs. A fraction of 0
//! with generated pairs is the zero-shot condition.

mod index;
mod metrics;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use index::SynonymIndex;
pub use metrics::{accuracy, f1_set, ndcg_at_k, recall_at_k};

use crate::error::{Error, Result};
use crate::store::NormPair;
use crate::text::TermText;

/// A validation query and every standard name accepted for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub text: TermText,
    pub gold: BTreeSet<String>,
}

/// Groups pairs by unnormalized text; each group becomes one query.
pub fn queries_from_pairs(pairs: &[NormPair]) -> Vec<Query> {
    let mut grouped: BTreeMap<&TermText, BTreeSet<String>> = BTreeMap::new();
    for p in pairs {
        grouped.entry(&p.unnormalized).or_default().insert(p.standard.to_string());
    }
    grouped
        .into_iter()
        .map(|(text, gold)| Query { text: text.clone(), gold })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub f1: f64,
    pub recall_at_k: f64,
    pub ndcg_at_k: f64,
    pub k: usize,
    pub n_queries: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub k: usize,
    /// When set, the F1 prediction set is every top-k name scoring at least
    /// this much; otherwise it is the rank-1 name alone.
    pub f1_threshold: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { k: 5, f1_threshold: None }
    }
}

pub fn evaluate(index: &SynonymIndex, queries: &[Query], opts: &EvalOptions) -> Result<EvalReport> {
    if opts.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let rankings: Vec<Vec<(String, f64)>> = queries
        .par_iter()
        .map(|q| index.rank(&q.text, opts.k))
        .collect::<Result<_>>()?;
    let gold: Vec<BTreeSet<String>> = queries.iter().map(|q| q.gold.clone()).collect();
    let ranked: Vec<Vec<String>> = rankings
        .iter()
        .map(|r| r.iter().map(|(s, _)| s.clone()).collect())
        .collect();
    let predicted: Vec<BTreeSet<String>> = rankings
        .iter()
        .map(|r| match opts.f1_threshold {
            Some(t) => r.iter().filter(|(_, v)| *v >= t).map(|(s, _)| s.clone()).collect(),
            None => r.iter().take(1).map(|(s, _)| s.clone()).collect(),
        })
        .collect();
    Ok(EvalReport {
        accuracy: accuracy(&gold, &ranked)?,
        f1: f1_set(&gold, &predicted)?,
        recall_at_k: recall_at_k(&gold, &ranked, opts.k)?,
        ndcg_at_k: ndcg_at_k(&gold, &ranked, opts.k)?,
        k: opts.k,
        n_queries: queries.len(),
    })
}

/// Seeded permutation of the training pairs. Every sample is a prefix of
/// it, so smaller fractions are subsets of larger ones.
pub fn nested_order(task_pairs: &[NormPair], seed: u64) -> Vec<&NormPair> {
    let mut order: Vec<&NormPair> = task_pairs.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

pub fn sample_size(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).floor() as usize).min(n)
}

/// Evaluates each fraction of the training pairs, optionally with the
/// generated pairs added to every index.
pub fn subsample_experiment(
    task_pairs: &[NormPair],
    augmented: &[NormPair],
    queries: &[Query],
    fractions: &[f64],
    seed: u64,
    with_augmentation: bool,
    opts: &EvalOptions,
) -> Result<Vec<(f64, EvalReport)>> {
    let order = nested_order(task_pairs, seed);
    let mut out = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let zero_shot = fraction == 0.0 && with_augmentation;
        if !(fraction > 0.0 && fraction <= 1.0) && !zero_shot {
            return Err(Error::Config(format!("fraction {fraction} is outside (0, 1]")));
        }
        let n = sample_size(fraction, order.len());
        if n == 0 && !zero_shot {
            return Err(Error::EmptySample(fraction));
        }
        let mut index = SynonymIndex::from_pairs(order[..n].iter().copied());
        if with_augmentation {
            for p in augmented {
                index.add_pair(p);
            }
        }
        out.push((fraction, evaluate(&index, queries, opts)?));
    }
    Ok(out)
}

/// One row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub fraction: f64,
    pub augmented: bool,
    #[serde(flatten)]
    pub report: EvalReport,
}

/// Baseline and augmented runs for every fraction, plus the zero-shot row
/// (augmented pairs only) when generated pairs are supplied.
pub fn comparison(
    task_pairs: &[NormPair],
    augmented: Option<&[NormPair]>,
    queries: &[Query],
    fractions: &[f64],
    seed: u64,
    opts: &EvalOptions,
) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::new();
    let baseline = subsample_experiment(task_pairs, &[], queries, fractions, seed, false, opts)?;
    let boosted = match augmented {
        Some(aug) => Some(subsample_experiment(task_pairs, aug, queries, fractions, seed, true, opts)?),
        None => None,
    };
    for (i, (fraction, report)) in baseline.into_iter().enumerate() {
        rows.push(ExperimentRow { fraction, augmented: false, report });
        if let Some(b) = &boosted {
            rows.push(ExperimentRow {
                fraction,
                augmented: true,
                report: b[i].1,
            });
        }
    }
    if let Some(aug) = augmented {
        let zero = subsample_experiment(task_pairs, aug, queries, &[0.0], seed, true, opts)?;
        rows.push(ExperimentRow {
            fraction: 0.0,
            augmented: true,
            report: zero[0].1,
        });
    }
    Ok(rows)
}

pub fn summary_table(rows: &[ExperimentRow]) -> String {
    let k = rows.first().map_or(5, |r| r.report.k);
    let mut out = format!(
        "{:>8} {:>9} {:>8} {:>8} {:>10} {:>8} {:>8}\n",
        "fraction",
        "augmented",
        "acc",
        "f1",
        format!("recall@{k}"),
        format!("ndcg@{k}"),
        "queries"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>8.2} {:>9} {:>8.4} {:>8.4} {:>10.4} {:>8.4} {:>8}\n",
            r.fraction,
            if r.augmented { "yes" } else { "no" },
            r.report.accuracy,
            r.report.f1,
            r.report.recall_at_k,
            r.report.ndcg_at_k,
            r.report.n_queries
        ));
    }
    out
}
