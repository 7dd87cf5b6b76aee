//! Command-line front end: `augment`, `tag`, `score`, `stats`, `eval`.
//!
//! Exit status is 0 on success, 1 for input errors and 2 for configuration
//! errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use disease_aug::eval::{self, EvalOptions};
use disease_aug::filter::{EmbedderChoice, FilterConfig, NgmMode, SemanticFilter, DEFAULT_DIMENSION};
use disease_aug::pipeline::{self, parse_methods, PipelineConfig};
use disease_aug::store::{load_task_pairs, AxisLexicons, Format, DEFAULT_GOLD_DELIMITER};
use disease_aug::tagger::{spans_to_bio, AxisTagger, LexiconTagger, PretaggedTagger};
use disease_aug::{Error, NormPair, Provenance, TermText};

#[derive(Parser)]
#[command(name = "disease-aug", version, about = "Generate and evaluate disease-name normalization pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full augmentation pipeline.
    Augment(AugmentArgs),
    /// Print character-level BIO axis tags for a list of terms.
    Tag(TagArgs),
    /// Print n-gram and cosine scores for (unnormalized, standard) pairs.
    Score(ScoreArgs),
    /// Summarize a dataset file.
    Stats(StatsArgs),
    /// Measure generated pairs on a retrieval normalizer.
    Eval(EvalArgs),
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated subset of ar1,ar2,mga-code,mga-region; empty disables all.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    format: Option<Format>,
    /// Output directory, overriding the config file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LexiconArgs {
    /// Pipeline config to take lexicon paths from.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    centers: Option<PathBuf>,
    #[arg(long)]
    regions: Option<PathBuf>,
    #[arg(long)]
    characteristics: Option<PathBuf>,
    /// Pre-tagged JSONL file consulted before the lexicons.
    #[arg(long)]
    pretagged: Option<PathBuf>,
}

#[derive(Args)]
struct TagArgs {
    #[command(flatten)]
    lexicons: LexiconArgs,
    /// File with one term per line; stdin when omitted and no terms given.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `tsv` prints `term<TAB>tags`; `jsonl` prints records the pre-tagged loader accepts.
    #[arg(long, default_value = "tsv")]
    format: Format,
    terms: Vec<String>,
}

#[derive(Args)]
struct ScoreArgs {
    /// TSV file of `unnormalized<TAB>standard` lines; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = disease_aug::filter::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = disease_aug::filter::DEFAULT_BETA)]
    beta: f64,
    /// Precomputed `term<TAB>v1,v2,...` vectors instead of the hashed embedder.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DIMENSION)]
    dim: usize,
    #[arg(long, default_value = "multiset")]
    ngm_mode: NgmMode,
}

#[derive(Args)]
struct StatsArgs {
    path: PathBuf,
    /// Defaults to the file extension.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    augmented: Option<PathBuf>,
    #[arg(long)]
    valid: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.3,0.5,1.0")]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Predict every top-k name scoring at least this much for F1.
    #[arg(long)]
    f1_threshold: Option<f64>,
    #[arg(long, default_value = DEFAULT_GOLD_DELIMITER)]
    delimiter: String,
    /// Write JSONL rows here and the table to stdout; otherwise rows go to
    /// stdout and the table to stderr.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn format_for(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => Format::Jsonl,
        _ => Format::Tsv,
    })
}

fn read_input_lines(path: Option<&Path>) -> Result<Vec<String>> {
    let lines: Vec<String> = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Error::Io { path: p.into(), source: e })?
            .lines()
            .map(str::to_string)
            .collect(),
        None => io::stdin().lock().lines().collect::<io::Result<_>>()?,
    };
    Ok(lines.into_iter().filter(|l| !l.trim().is_empty()).collect())
}

fn augment(args: AugmentArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.augment.rng_seed = seed;
    }
    if let Some(alpha) = args.alpha {
        cfg.filter.alpha = alpha;
    }
    if let Some(beta) = args.beta {
        cfg.filter.beta = beta;
    }
    if let Some(methods) = &args.methods {
        cfg.augment.enabled_methods = parse_methods(methods)?;
    }
    if let Some(workers) = args.workers {
        cfg.workers = Some(workers);
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(dir) = args.output {
        cfg.output.dir = dir;
    }
    cfg.validate()?;
    let (outputs, stats) = pipeline::run(&cfg)?;
    print!("{}", stats.summary());
    println!("wrote {}", outputs.dataset.display());
    println!("wrote {}", outputs.augmented.display());
    println!("wrote {}", outputs.original.display());
    Ok(())
}

fn build_tagger(args: &LexiconArgs) -> Result<Box<dyn AxisTagger>> {
    let from_config = match &args.config {
        Some(path) => Some(PipelineConfig::load(path)?),
        None => None,
    };
    let pick = |flag: &Option<PathBuf>, cfg: Option<&PathBuf>, name: &str| -> Result<PathBuf> {
        flag.clone()
            .or_else(|| cfg.cloned())
            .ok_or_else(|| Error::Config(format!("--{name} (or --config) is required")).into())
    };
    let inputs = from_config.as_ref().map(|c| &c.inputs);
    let pretagged = args.pretagged.clone().or_else(|| inputs.and_then(|i| i.pretagged.clone()));
    let lexicon_paths = (
        pick(&args.centers, inputs.map(|i| &i.centers), "centers"),
        pick(&args.regions, inputs.map(|i| &i.regions), "regions"),
        pick(&args.characteristics, inputs.map(|i| &i.characteristics), "characteristics"),
    );
    let lexicon_tagger = match lexicon_paths {
        (Ok(c), Ok(r), Ok(ch)) => {
            let lex = AxisLexicons::load(&c, &r, &ch)?;
            lex.validate_for_tagging()?;
            Some(LexiconTagger::new(&lex))
        }
        (c, r, ch) if pretagged.is_none() => {
            c?;
            r?;
            ch?;
            unreachable!()
        }
        _ => None,
    };
    Ok(match pretagged {
        Some(path) => Box::new(PretaggedTagger::load(
            path,
            lexicon_tagger.map(|t| Box::new(t) as Box<dyn AxisTagger>),
        )?),
        None => Box::new(lexicon_tagger.expect("checked above")),
    })
}

fn tag(args: TagArgs) -> Result<()> {
    let tagger = build_tagger(&args.lexicons)?;
    let terms = if args.terms.is_empty() {
        read_input_lines(args.input.as_deref())?
    } else {
        args.terms.clone()
    };
    let mut out = io::stdout().lock();
    for raw in terms {
        let term = TermText::new(&raw)?;
        let tagged = tagger.tag(&term);
        let bio: Vec<String> = spans_to_bio(&tagged).iter().map(ToString::to_string).collect();
        match args.format {
            Format::Tsv => writeln!(out, "{}\t{}", term, bio.join(" "))?,
            Format::Jsonl => writeln!(
                out,
                "{}",
                serde_json::json!({ "term": term.as_str(), "spans": tagged.spans(), "bio": bio })
            )?,
        }
    }
    Ok(())
}

fn score(args: ScoreArgs) -> Result<()> {
    let cfg = FilterConfig {
        alpha: args.alpha,
        beta: args.beta,
        ngm_mode: args.ngm_mode,
        embedder: match args.embeddings {
            Some(path) => EmbedderChoice::File { path },
            None => EmbedderChoice::Hashed { dimension: args.dim },
        },
    };
    let filter = SemanticFilter::from_config(&cfg)?;
    let mut out = io::stdout().lock();
    writeln!(out, "unnormalized\tstandard\tngm\tcos\tkept")?;
    for (i, line) in read_input_lines(args.input.as_deref())?.iter().enumerate() {
        let (u, s) = line
            .split_once('\t')
            .with_context(|| format!("line {}: expected `unnormalized<TAB>standard`", i + 1))?;
        let pair = NormPair::new(TermText::new(u)?, TermText::new(s)?, None, Provenance::Ar1);
        match filter.score(&pair) {
            Ok(sc) => {
                let kept = sc.ngm > filter.alpha() && sc.cos > filter.beta();
                writeln!(out, "{}\t{}\t{}\t{}\t{}", pair.unnormalized, pair.standard, sc.ngm, sc.cos, kept)?
            }
            Err(e) => writeln!(out, "{}\t{}\t\t\tfalse\t# {e}", pair.unnormalized, pair.standard)?,
        }
    }
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let format = format_for(&args.path, args.format);
    let pairs = pipeline::read_dataset(&args.path, format)?;
    #[derive(Default)]
    struct Acc {
        n: usize,
        scored: usize,
        ngm: f64,
        cos: f64,
    }
    let mut by_prov: BTreeMap<Provenance, Acc> = BTreeMap::new();
    for p in &pairs {
        let acc = by_prov.entry(p.provenance).or_default();
        acc.n += 1;
        if let Some(s) = p.scores {
            acc.scored += 1;
            acc.ngm += s.ngm;
            acc.cos += s.cos;
        }
    }
    let standards: std::collections::BTreeSet<&str> = pairs.iter().map(|p| p.standard.as_str()).collect();
    println!("{:<12} {:>8} {:>10} {:>10}", "provenance", "pairs", "mean_ngm", "mean_cos");
    for (prov, acc) in &by_prov {
        let mean = |x: f64| if acc.scored == 0 { "-".to_string() } else { format!("{:.4}", x / acc.scored as f64) };
        println!("{:<12} {:>8} {:>10} {:>10}", prov.as_str(), acc.n, mean(acc.ngm), mean(acc.cos));
    }
    println!("total pairs: {}", pairs.len());
    println!("distinct standard names: {}", standards.len());
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let train = load_task_pairs(&args.train, format_for(&args.train, None), &args.delimiter)?;
    let valid = load_task_pairs(&args.valid, format_for(&args.valid, None), &args.delimiter)?;
    let augmented = match &args.augmented {
        Some(path) => Some(pipeline::read_dataset(path, format_for(path, None))?),
        None => None,
    };
    let queries = eval::queries_from_pairs(&valid);
    let opts = EvalOptions {
        k: args.k,
        f1_threshold: args.f1_threshold,
    };
    let rows = eval::comparison(&train, augmented.as_deref(), &queries, &args.fractions, args.seed, &opts)?;
    let jsonl: String = rows
        .iter()
        .map(|r| serde_json::to_string(r).map(|s| s + "\n"))
        .collect::<std::result::Result<_, _>>()?;
    let table = eval::summary_table(&rows);
    match &args.report {
        Some(path) => {
            fs::write(path, jsonl).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            print!("{table}");
        }
        None => {
            print!("{jsonl}");
            eprint!("{table}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Augment(a) => augment(a),
        Command::Tag(a) => tag(a),
        Command::Score(a) => score(a),
        Command::Stats(a) => stats(a),
        Command::Eval(a) => run_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let config = err.downcast_ref::<Error>().is_some_and(Error::is_config);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
