//! Writes the synthetic evaluation corpus used by the integration tests.
//!
//!     cargo run -p disease-aug --example make_synth -- crates/core/tests/fixtures/synth
//!
//! Output is a pure function of the constants below.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_501;

const TREE: &[(&str, &[&str])] = &[
    ("胸部", &["肺", "心脏", "食管", "乳腺"]),
    ("腹部", &["肝", "胃", "胆囊", "胰腺", "脾", "肠", "肾"]),
    ("肠", &["结肠", "小肠", "直肠"]),
    ("头部", &["脑"]),
    ("颈部", &["甲状腺"]),
    ("盆腔", &["膀胱", "子宫", "卵巢", "前列腺"]),
];

const CENTERS: &[(&str, char)] = &[
    ("恶性肿瘤", 'C'),
    ("良性肿瘤", 'D'),
    ("炎", 'K'),
    ("结核", 'A'),
    ("囊肿", 'N'),
    ("出血", 'R'),
    ("损伤", 'S'),
    ("结石", 'Q'),
    ("溃疡", 'L'),
    ("梗死", 'I'),
];

const CHARACTERISTICS: &[&str] = &["急性", "慢性", "原发性", "继发性"];

const PREFIXES: &[&str] = &["左", "右", "双侧"];
const SUFFIXES: &[&str] = &["待查", "可能"];

fn regions() -> Vec<&'static str> {
    let mut out: Vec<&str> = Vec::new();
    for (parent, kids) in TREE {
        for r in std::iter::once(parent).chain(kids.iter()) {
            if !out.contains(r) {
                out.push(r);
            }
        }
    }
    out
}

fn variant(rng: &mut ChaCha8Rng, standard: &str) -> String {
    match rng.gen_range(0..10) {
        0..=5 => format!("{}{standard}", PREFIXES.choose(rng).unwrap()),
        6..=8 => format!("{standard}{}", SUFFIXES.choose(rng).unwrap()),
        _ if standard.ends_with("恶性肿瘤") => standard.replace("恶性肿瘤", "癌"),
        _ => format!("{}{standard}", PREFIXES.choose(rng).unwrap()),
    }
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).expect("usage: make_synth <dir>"));
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let regions = regions();

    // vocabulary: about two thirds of region x center, plus characteristic
    // variants as six-digit children of their base name
    let mut icd = String::new();
    let mut names: Vec<(String, String)> = Vec::new();
    for (ci, (center, letter)) in CENTERS.iter().enumerate() {
        for (ri, region) in regions.iter().enumerate() {
            if !rng.gen_bool(0.68) {
                continue;
            }
            let code = format!("{letter}{:02}.{}", ri + 10, ci);
            let name = format!("{region}{center}");
            names.push((code.clone(), name));
            if rng.gen_bool(0.1) {
                let ch = CHARACTERISTICS.choose(&mut rng).unwrap();
                names.push((format!("{code}01"), format!("{ch}{region}{center}")));
            }
        }
    }
    for (code, name) in &names {
        writeln!(icd, "{code}\t{name}").unwrap();
    }

    // seen / unseen split over vocabulary names
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.shuffle(&mut rng);
    let n_seen = names.len() * 55 / 100;
    let (seen, unseen) = order.split_at(n_seen);

    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut train = String::new();
    let mut n_train = 0;
    while n_train < 150 {
        let (code, name) = &names[*seen.choose(&mut rng).unwrap()];
        let u = variant(&mut rng, name);
        if used.insert(u.clone()) {
            writeln!(train, "{u}\t{name}\t{code}").unwrap();
            n_train += 1;
        }
    }

    let mut valid = String::new();
    let mut n_valid = 0;
    let picks = unseen.iter().take(38).chain(seen.iter().rev().take(12));
    for &i in picks {
        let (code, name) = &names[i];
        loop {
            let u = variant(&mut rng, name);
            if used.insert(u.clone()) {
                writeln!(valid, "{u}\t{name}\t{code}").unwrap();
                n_valid += 1;
                break;
            }
        }
    }

    let mut tree = String::new();
    for (parent, kids) in TREE {
        for kid in *kids {
            writeln!(tree, "{kid}\t{parent}").unwrap();
        }
    }
    let lines = |items: &[&str]| items.iter().map(|s| format!("{s}\n")).collect::<String>();
    let centers: Vec<&str> = CENTERS.iter().map(|(c, _)| *c).collect();

    fs::write(dir.join("icd.tsv"), icd).unwrap();
    fs::write(dir.join("region_tree.tsv"), tree).unwrap();
    fs::write(dir.join("centers.txt"), lines(&centers)).unwrap();
    fs::write(dir.join("regions.txt"), lines(&regions)).unwrap();
    fs::write(dir.join("characteristics.txt"), lines(CHARACTERISTICS)).unwrap();
    fs::write(dir.join("train.tsv"), train).unwrap();
    fs::write(dir.join("valid.tsv"), valid).unwrap();
    eprintln!("{} names, {n_train} training pairs, {n_valid} queries", names.len());
}
