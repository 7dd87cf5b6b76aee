//! Shared fixtures and brute-force oracles for the integration suites.
//!
//! Every oracle here works from the rule definitions directly (materialized
//! substrings, explicit component names, naive ancestor walks) and shares no
//! code with the library beyond its public types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use disease_aug::augment::{AugConfig, TaggedIndex};
use disease_aug::pipeline::PipelineConfig;
use disease_aug::store::{AxisLexicons, IcdEntry, IcdVocabulary, RegionTree};
use disease_aug::tagger::{AxisLabel, LexiconTagger};
use disease_aug::{NormPair, Provenance, TermText};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Loads a fixture config with its output redirected to `out`.
pub fn fixture_config(name: &str, out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(fixture(name).join("config.toml")).expect("fixture config loads");
    cfg.output.dir = out.to_path_buf();
    cfg
}

pub fn t(s: &str) -> TermText {
    TermText::new(s).unwrap()
}

// ---------------------------------------------------------------- n-grams

/// Sum over n of the multiset intersection of materialized n-substrings,
/// divided by the shorter length. No early exit.
pub fn brute_ngm(u: &str, s: &str) -> f64 {
    let u: Vec<char> = u.chars().collect();
    let s: Vec<char> = s.chars().collect();
    let m = u.len().min(s.len());
    let mut matched = 0usize;
    for n in 1..=m {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for i in 0..=u.len() - n {
            *counts.entry(u[i..i + n].iter().collect()).or_default() += 1;
        }
        for i in 0..=s.len() - n {
            let gram: String = s[i..i + n].iter().collect();
            if let Some(c) = counts.get_mut(&gram) {
                if *c > 0 {
                    *c -= 1;
                    matched += 1;
                }
            }
        }
    }
    matched as f64 / m as f64
}

// -------------------------------------------------------------- embedding

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 14_695_981_039_346_656_037;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(1_099_511_628_211);
    }
    h
}

/// Bag of character unigrams and bigrams hashed into `dim` buckets.
pub fn oracle_embed(term: &str, dim: usize) -> Vec<f64> {
    let chars: Vec<char> = term.chars().collect();
    let mut grams: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
    grams.extend(chars.windows(2).map(|w| w.iter().collect::<String>()));
    let mut v = vec![0.0; dim];
    for g in grams {
        v[(fnv1a(g.as_bytes()) % dim as u64) as usize] += 1.0;
    }
    v
}

pub fn oracle_cos(a: &str, b: &str) -> f64 {
    let (x, y) = (oracle_embed(a, 256), oracle_embed(b, 256));
    let dot: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
    let nx = x.iter().map(|p| p * p).sum::<f64>().sqrt();
    let ny = y.iter().map(|q| q * q).sum::<f64>().sqrt();
    dot / (nx * ny)
}

/// Strict-threshold keep decision for a generated pair.
pub fn oracle_keep(u: &str, s: &str, alpha: f64, beta: f64) -> bool {
    brute_ngm(u, s) > alpha && oracle_cos(u, s) > beta
}

// ------------------------------------------------------------------ pairs

/// `(provenance, unnormalized, standard, code)`.
pub type Quad = (Provenance, String, String, Option<String>);

pub fn quad(p: &NormPair) -> Quad {
    (
        p.provenance,
        p.unnormalized.to_string(),
        p.standard.to_string(),
        p.standard_code.clone(),
    )
}

pub fn quads(pairs: &[NormPair]) -> BTreeSet<Quad> {
    pairs.iter().map(quad).collect()
}

/// Reads the hand-enumerated `provenance<TAB>u<TAB>s<TAB>code` listing.
pub fn read_expected(path: &Path) -> BTreeSet<Quad> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            assert_eq!(f.len(), 4, "bad expected line {l:?}");
            (f[0].parse().unwrap(), f[1].into(), f[2].into(), Some(f[3].into()))
        })
        .collect()
}

/// Priority dedupe on `(u, s)`: the higher provenance wins, ties go to the
/// canonically first record.
pub fn oracle_dedupe(pairs: impl IntoIterator<Item = Quad>) -> BTreeSet<Quad> {
    fn rank(p: Provenance) -> u8 {
        match p {
            Provenance::Original => 4,
            Provenance::Ar2 => 3,
            Provenance::Ar1 => 2,
            Provenance::MgaCode => 1,
            Provenance::MgaRegion => 0,
        }
    }
    let sorted: BTreeSet<Quad> = pairs.into_iter().collect();
    let mut best: BTreeMap<(String, String), Quad> = BTreeMap::new();
    for q in sorted {
        let key = (q.1.clone(), q.2.clone());
        match best.get(&key) {
            Some(cur) if rank(cur.0) >= rank(q.0) => {}
            _ => {
                best.insert(key, q);
            }
        }
    }
    best.into_values().collect()
}

// ------------------------------------------------------- composed vocabularies

/// A disease name assembled from known axis words, so its tags are known
/// without running a tagger.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Name {
    pub characteristic: Option<String>,
    pub region: Option<String>,
    pub center: Option<String>,
}

impl Name {
    pub fn text(&self) -> String {
        [&self.characteristic, &self.region, &self.center]
            .into_iter()
            .flatten()
            .cloned()
            .collect()
    }

    pub fn get(&self, label: AxisLabel) -> Option<&String> {
        match label {
            AxisLabel::Center => self.center.as_ref(),
            AxisLabel::Region => self.region.as_ref(),
            AxisLabel::Characteristic => self.characteristic.as_ref(),
        }
    }

    fn with(&self, label: AxisLabel, value: &str) -> Name {
        let mut out = self.clone();
        let slot = match label {
            AxisLabel::Center => &mut out.center,
            AxisLabel::Region => &mut out.region,
            AxisLabel::Characteristic => &mut out.characteristic,
        };
        *slot = Some(value.to_string());
        out
    }
}

#[derive(Debug, Clone)]
pub struct ComposedCorpus {
    pub centers: Vec<String>,
    pub regions: Vec<String>,
    pub characteristics: Vec<String>,
    pub entries: Vec<(String, Name)>,
    /// child -> parent
    pub parents: BTreeMap<String, String>,
    pub seeds: Vec<(String, Name)>,
}

const POOL: &str = "肺肝胃肾脑心脾胆肠骨眼耳鼻喉舌牙皮颈腰背膝髋踝腕肘肩胸腹盆乳卵宫膀腺甲状垂体炎癌瘤核病症损伤梗死血栓囊肿结石溃疡急慢原继发先天获得良恶";
const NOISE: &[&str] = &["左", "右", "双侧", "待查", "可能", "复查"];

fn codes_for(entries: &[(String, Name)], text: &str) -> BTreeSet<String> {
    entries.iter().filter(|(_, n)| n.text() == text).map(|(c, _)| c.clone()).collect()
}

fn alnum(code: &str) -> usize {
    code.chars().filter(|c| c.is_alphanumeric()).count()
}

impl ComposedCorpus {
    /// A random corpus of at most `max_entries` names. Axis words use
    /// pairwise-disjoint characters, so tagging a composed name is
    /// unambiguous.
    pub fn random(rng: &mut ChaCha8Rng, max_entries: usize) -> Self {
        let mut pool: Vec<char> = POOL.chars().collect::<BTreeSet<_>>().into_iter().collect();
        pool.shuffle(rng);
        let mut pool = pool.into_iter();
        let mut words = |n: usize| -> Vec<String> {
            (0..n)
                .map(|_| {
                    let len = rng.gen_range(1..=2);
                    pool.by_ref().take(len).collect()
                })
                .collect()
        };
        let centers = words(4);
        let regions = words(6);
        let characteristics = words(2);

        let mut parents = BTreeMap::new();
        for (i, r) in regions.iter().enumerate().skip(1) {
            if rng.gen_bool(0.6) {
                parents.insert(r.clone(), regions[rng.gen_range(0..i)].clone());
            }
        }

        let n = rng.gen_range(4..=max_entries);
        let mut entries: Vec<(String, Name)> = Vec::new();
        let mut used_codes: BTreeSet<String> = BTreeSet::new();
        while entries.len() < n {
            let name = Name {
                characteristic: rng.gen_bool(0.3).then(|| characteristics.choose(rng).unwrap().clone()),
                region: rng.gen_bool(0.9).then(|| regions.choose(rng).unwrap().clone()),
                center: Some(centers.choose(rng).unwrap().clone()),
            };
            // six-digit codes hang under an existing four-digit code when possible
            let fours: Vec<&String> = used_codes.iter().filter(|c| alnum(c) == 4).collect();
            let code = if !fours.is_empty() && rng.gen_bool(0.4) {
                format!("{}{:02}", fours.choose(rng).unwrap(), rng.gen_range(0..100))
            } else {
                format!("X{:02}.{}", rng.gen_range(0..30), rng.gen_range(0..10))
            };
            if used_codes.insert(code.clone()) {
                entries.push((code, name));
            }
        }

        let n_seeds = rng.gen_range(1..=5);
        let seeds = (0..n_seeds)
            .map(|_| {
                let s = entries.choose(rng).unwrap().1.clone();
                let noise = NOISE.choose(rng).unwrap();
                let u = if rng.gen_bool(0.5) {
                    format!("{noise}{}", s.text())
                } else {
                    format!("{}{noise}", s.text())
                };
                (u, s)
            })
            .collect();

        ComposedCorpus {
            centers,
            regions,
            characteristics,
            entries,
            parents,
            seeds,
        }
    }

    pub fn vocab(&self) -> IcdVocabulary {
        IcdVocabulary::from_entries(self.entries.iter().map(|(c, n)| IcdEntry::new(c, &n.text()).unwrap())).unwrap()
    }

    pub fn tree(&self) -> RegionTree {
        RegionTree::from_edges(self.parents.iter().map(|(c, p)| (c.as_str(), p.as_str()))).unwrap()
    }

    pub fn task_pairs(&self) -> Vec<NormPair> {
        self.seeds.iter().map(|(u, s)| NormPair::original(u, &s.text()).unwrap()).collect()
    }

    /// Library index over the same terms the pipeline tags.
    pub fn index(&self) -> TaggedIndex {
        let lex = AxisLexicons::new(&self.centers, &self.regions, &self.characteristics);
        let tagger = LexiconTagger::new(&lex);
        let pairs = self.task_pairs();
        let names: Vec<TermText> = self.entries.iter().map(|(_, n)| t(&n.text())).collect();
        let terms = names.iter().chain(pairs.iter().flat_map(|p| [&p.unnormalized, &p.standard]));
        TaggedIndex::build(&tagger, terms)
    }

    fn distinct_names(&self) -> Vec<&Name> {
        let mut seen = BTreeSet::new();
        self.entries
            .iter()
            .map(|(_, n)| n)
            .filter(|n| seen.insert(n.text()))
            .collect()
    }

    fn is_strict_ancestor(&self, big: &str, small: &str) -> bool {
        let mut cur = small;
        while let Some(p) = self.parents.get(cur) {
            if p == big {
                return true;
            }
            cur = p;
        }
        false
    }
}

fn shares_other_axis(a: &Name, b: &Name, except: AxisLabel) -> bool {
    AxisLabel::ALL
        .into_iter()
        .filter(|l| *l != except)
        .any(|l| a.get(l).is_some() && a.get(l) == b.get(l))
}

pub fn oracle_ar1(c: &ComposedCorpus, axes: &[AxisLabel]) -> BTreeSet<Quad> {
    let mut out = BTreeSet::new();
    let names = c.distinct_names();
    for a in &names {
        for b in &names {
            if a.text() == b.text() {
                continue;
            }
            for &axis in axes {
                let (Some(x), Some(y)) = (a.get(axis), b.get(axis)) else {
                    continue;
                };
                if x == y || !shares_other_axis(a, b, axis) {
                    continue;
                }
                let rewritten = a.with(axis, y).text();
                if rewritten == b.text() {
                    continue;
                }
                let existing = codes_for(&c.entries, &rewritten);
                for code in codes_for(&c.entries, &b.text()) {
                    if !existing.is_empty() && !existing.contains(&code) {
                        continue;
                    }
                    out.insert((Provenance::Ar1, rewritten.clone(), b.text(), Some(code)));
                }
            }
        }
    }
    out
}

pub fn oracle_ar2(c: &ComposedCorpus, axes: &[AxisLabel]) -> BTreeSet<Quad> {
    let mut out = BTreeSet::new();
    for (u, s) in &c.seeds {
        for cand in c.distinct_names() {
            for &axis in axes {
                let (Some(x), Some(y)) = (s.get(axis), cand.get(axis)) else {
                    continue;
                };
                if x == y || !shares_other_axis(s, cand, axis) || !u.contains(x.as_str()) {
                    continue;
                }
                let rewritten = u.replacen(x.as_str(), y, 1);
                if rewritten == cand.text() {
                    continue;
                }
                for code in codes_for(&c.entries, &cand.text()) {
                    out.insert((Provenance::Ar2, rewritten.clone(), cand.text(), Some(code)));
                }
            }
        }
    }
    out
}

pub fn oracle_mga_code(c: &ComposedCorpus) -> BTreeSet<Quad> {
    let mut out = BTreeSet::new();
    for (pc, parent) in &c.entries {
        if alnum(pc) > 4 {
            continue;
        }
        for (cc, child) in &c.entries {
            if alnum(cc) > 4 && cc.starts_with(pc.as_str()) && parent.text() != child.text() {
                out.insert((Provenance::MgaCode, parent.text(), child.text(), Some(cc.clone())));
            }
        }
    }
    out
}

pub fn oracle_mga_region(c: &ComposedCorpus) -> BTreeSet<Quad> {
    let mut out = BTreeSet::new();
    let names = c.distinct_names();
    for x in &names {
        for y in &names {
            let (Some(cx), Some(cy), Some(rx), Some(ry)) = (&x.center, &y.center, &x.region, &y.region) else {
                continue;
            };
            if cx != cy || x.text() == y.text() || !c.is_strict_ancestor(ry, rx) {
                continue;
            }
            for code in codes_for(&c.entries, &x.text()) {
                out.insert((Provenance::MgaRegion, y.text(), x.text(), Some(code)));
            }
        }
    }
    out
}

/// Augmentation settings with every method on and no cap.
pub fn uncapped() -> AugConfig {
    AugConfig {
        max_pairs_per_source: usize::MAX,
        ..AugConfig::default()
    }
}

/// True when `generated` equals `source` outside one contiguous span whose
/// replacement is `value`.
pub fn differs_in_one_span(source: &str, generated: &str, value: &str) -> bool {
    let src: Vec<char> = source.chars().collect();
    let gen: Vec<char> = generated.chars().collect();
    let val: Vec<char> = value.chars().collect();
    (0..=src.len()).any(|start| {
        (start + 1..=src.len()).any(|end| {
            gen.len() + (end - start) == src.len() + val.len()
                && gen[..start] == src[..start]
                && gen[start..start + val.len()] == val[..]
                && gen[start + val.len()..] == src[end..]
        })
    })
}
