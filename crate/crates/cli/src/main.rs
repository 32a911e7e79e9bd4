//! Single entry point wiring every stage of the evaluation pipeline into
//! subcommands: parse, transform, generate, infer, constraints, llm-eval,
//! score, stats, leak-scan, and freq.
//!
//! Exit codes: 0 on success, 1 on operational errors, 2 on usage errors.

mod config;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use snipinfer_core::infer::{dump_constraints, extract_constraints, infer_imports};
use snipinfer_core::kb::{load_kb, KbError, KnowledgeBase};
use snipinfer_core::leakage::{self, LeakError, MatchMode};
use snipinfer_core::score::freq::{bucket_recall, doc_freq, BucketRow, DocFreqTable, DEFAULT_EDGES};
use snipinfer_core::score::wilcoxon::{wilcoxon_signed_rank, SigLevel, WilcoxonResult};
use snipinfer_core::score::{aggregate, score_snippet, EvalReport, ReportMeta, SnippetScore};
use snipinfer_core::snippet::{load_corpus, save_corpus, CorpusError};
use snipinfer_core::syntax::{parse, render, ParseError};
use snipinfer_core::transform::{apply, TransformKind};
use snipinfer_core::generate::{generate_corpus, GenConfig, GenError};
use snipinfer_core::{Corpus, Fqn, ImportSet};
use snipinfer_llm::{run_eval, save_results, RunConfig};

use config::{Effective, FileConfig};
use report::write_report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Query(#[from] snipinfer_llm::QueryError),
    #[error(transparent)]
    Leak(#[from] LeakError),
    #[error("{0}")]
    Msg(String),
}

#[derive(Parser)]
#[command(
    name = "snipinfer",
    version,
    about = "Evaluate type-inference techniques on Java code snippets"
)]
struct Cli {
    /// Flat TOML file supplying defaults for shared settings
    /// (seed, jobs, cache_dir, kb, endpoint, model).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Rename,
    Lower,
    Comment,
    All,
}

impl KindArg {
    fn kind(self) -> TransformKind {
        match self {
            KindArg::Rename => TransformKind::Rename,
            KindArg::Lower => TransformKind::Lower,
            KindArg::Comment => TransformKind::Comment,
            KindArg::All => TransformKind::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    F1,
    Precision,
    Recall,
}

impl MetricArg {
    fn name(self) -> &'static str {
        match self {
            MetricArg::F1 => "f1",
            MetricArg::Precision => "precision",
            MetricArg::Recall => "recall",
        }
    }

    fn get(self, score: &SnippetScore) -> Option<f64> {
        match self {
            MetricArg::F1 => score.f1,
            MetricArg::Precision => score.precision,
            MetricArg::Recall => score.recall,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that a Java file fits the snippet grammar; print it re-rendered.
    Parse {
        /// Java source file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Only report success or failure, print nothing.
        #[arg(long)]
        check: bool,
    },
    /// Rewrite a corpus with a semantic-preserving transformation.
    Transform {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Corpus directory to read.
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Directory for the rewritten corpus.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a benchmark corpus from a knowledge base.
    Generate {
        #[arg(long, value_name = "FILE")]
        kb: Option<PathBuf>,
        /// Library tags to draw from, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        libs: Vec<String>,
        /// Snippets per library.
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        chain_min: usize,
        #[arg(long, default_value_t = 5)]
        chain_max: usize,
    },
    /// Infer imports for every snippet with the constraint solver.
    Infer {
        #[arg(long, value_name = "FILE")]
        kb: Option<PathBuf>,
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Results file (JSON array of {id, imports, unsatisfied}).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Dump the constraint system extracted from one Java file.
    Constraints {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Query a chat-completion endpoint for every snippet.
    LlmEval {
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
        /// Results file (JSON array of inference results).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Sampling seed sent with each request.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        temperature: f64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_name = "DIR")]
        cache_dir: Option<PathBuf>,
        /// Environment variable holding the API key.
        #[arg(long, default_value = "OPENAI_API_KEY")]
        api_key_env: String,
        #[arg(long, default_value_t = 3)]
        max_retries: u32,
        #[arg(long, default_value_t = 120)]
        timeout_secs: u64,
    },
    /// Score a results file against a corpus's ground truth.
    Score {
        #[arg(long, value_name = "FILE")]
        results: PathBuf,
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Document-frequency table for a bucketed recall breakdown.
        #[arg(long, value_name = "FILE")]
        freq: Option<PathBuf>,
        /// Model label recorded in the report.
        #[arg(long)]
        model: Option<String>,
        /// Transformation label recorded in the report.
        #[arg(long)]
        transform: Option<String>,
    },
    /// Statistical comparisons between score reports.
    Stats {
        #[command(subcommand)]
        which: StatsCommand,
    },
    /// Scan dataset metadata for benchmark filename collisions.
    LeakScan {
        /// Metadata stream, .jsonl or .csv with path/repo/author.
        #[arg(long, value_name = "FILE")]
        meta: PathBuf,
        /// Benchmark basenames, one per line.
        #[arg(long, value_name = "FILE")]
        names: PathBuf,
        /// Minimum matches to make the shortlist.
        #[arg(long, default_value_t = 5)]
        min: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Case-fold and strip trailing digits before matching.
        #[arg(long)]
        normalized: bool,
    },
    /// Count files referencing each ground-truth type under a source tree.
    Freq {
        /// Root of the source tree to scan.
        #[arg(long, value_name = "DIR")]
        root: PathBuf,
        /// Corpus whose ground-truth types form the universe.
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Paired signed-rank test between two score reports.
    Wilcoxon {
        /// Baseline score report.
        #[arg(long, value_name = "FILE")]
        a: PathBuf,
        /// Comparison score report.
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::F1)]
        metric: MetricArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => error.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Parse { input, check } => cmd_parse(&input, check),
        Command::Transform {
            kind,
            input,
            out,
            seed,
        } => cmd_transform(&file, kind, &input, &out, seed),
        Command::Generate {
            kb,
            libs,
            n,
            seed,
            out,
            chain_min,
            chain_max,
        } => cmd_generate(&file, kb, libs, n, seed, &out, chain_min, chain_max),
        Command::Infer { kb, input, out } => cmd_infer(&file, kb, &input, &out),
        Command::Constraints { input } => cmd_constraints(&input),
        Command::LlmEval {
            endpoint,
            model,
            input,
            out,
            seed,
            temperature,
            jobs,
            cache_dir,
            api_key_env,
            max_retries,
            timeout_secs,
        } => cmd_llm_eval(
            &file,
            endpoint,
            model,
            &input,
            &out,
            seed,
            temperature,
            jobs,
            cache_dir,
            api_key_env,
            max_retries,
            timeout_secs,
        ),
        Command::Score {
            results,
            corpus,
            out,
            freq,
            model,
            transform,
        } => cmd_score(&file, &results, &corpus, &out, freq.as_deref(), model, transform),
        Command::Stats { which } => match which {
            StatsCommand::Wilcoxon { a, b, metric, out } => {
                cmd_wilcoxon(&file, &a, &b, metric, out.as_deref())
            }
        },
        Command::LeakScan {
            meta,
            names,
            min,
            out,
            normalized,
        } => cmd_leak_scan(&file, &meta, &names, min, &out, normalized),
        Command::Freq { root, corpus, out } => cmd_freq(&file, &root, &corpus, &out),
    }
}

fn effective(file: &FileConfig) -> Effective {
    Effective::resolve(file, None, None, None, None, None, None)
}

fn require_kb(flag: Option<PathBuf>, file: &FileConfig) -> Result<PathBuf, CliError> {
    flag.or_else(|| file.kb.clone()).ok_or_else(|| {
        CliError::Msg("no knowledge base: pass --kb or set kb in the config file".to_string())
    })
}

fn load_kb_at(path: &Path) -> Result<KnowledgeBase, CliError> {
    Ok(load_kb(path)?)
}

fn cmd_parse(input: &Path, check: bool) -> Result<(), CliError> {
    let source = fs::read_to_string(input)?;
    let stripped = snipinfer_core::snippet::strip_imports(&source).0;
    let unit = parse(&stripped)?;
    if check {
        println!("ok: {} parses", input.display());
    } else {
        print!("{}", render(&unit));
    }
    Ok(())
}

fn cmd_transform(
    file: &FileConfig,
    kind: KindArg,
    input: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let seed = seed.or(file.seed).unwrap_or(config::DEFAULT_SEED);
    let corpus = load_corpus(input)?;
    let mut transformed = Corpus::new(corpus.name.clone());
    let mut maps = Vec::new();
    for snippet in corpus.snippets() {
        let (rewritten, map) = apply(kind.kind(), snippet, seed)?;
        if let Some(map) = map {
            maps.push((rewritten.id.clone(), map));
        }
        transformed.push(rewritten)?;
    }
    save_corpus(&transformed, out)?;
    if !maps.is_empty() {
        let rename_dir = out.join("renames");
        fs::create_dir_all(&rename_dir)?;
        for (id, map) in &maps {
            let path = rename_dir.join(format!("{id}.json"));
            fs::write(path, serde_json::to_string_pretty(map)?)?;
        }
    }
    println!(
        "transformed {} snippet(s) with {} into {}",
        transformed.len(),
        kind.kind().name(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    file: &FileConfig,
    kb: Option<PathBuf>,
    libs: Vec<String>,
    n: usize,
    seed: Option<u64>,
    out: &Path,
    chain_min: usize,
    chain_max: usize,
) -> Result<(), CliError> {
    let kb_path = require_kb(kb, file)?;
    let kb = load_kb_at(&kb_path)?;
    let gen_config = GenConfig {
        libraries: libs,
        snippets_per_library: n,
        chain_min,
        chain_max,
        seed: seed.or(file.seed).unwrap_or(config::DEFAULT_SEED),
    };
    let corpus = generate_corpus(&kb, &gen_config)?;
    save_corpus(&corpus, out)?;
    println!("generated {} snippet(s) into {}", corpus.len(), out.display());
    Ok(())
}

/// One constraint-inference outcome, results-file compatible with the
/// LLM runner's records.
#[derive(Debug, Serialize, Deserialize)]
struct InferRecord {
    id: String,
    imports: ImportSet,
    unsatisfied: Vec<String>,
}

fn cmd_infer(
    file: &FileConfig,
    kb: Option<PathBuf>,
    input: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let kb_path = require_kb(kb, file)?;
    let kb = load_kb_at(&kb_path)?;
    let corpus = load_corpus(input)?;
    let mut records = Vec::with_capacity(corpus.len());
    for snippet in corpus.snippets() {
        let inference = infer_imports(snippet, &kb)?;
        records.push(InferRecord {
            id: snippet.id.clone(),
            imports: inference.imports,
            unsatisfied: inference.unsatisfied,
        });
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    fs::write(out, serde_json::to_string_pretty(&records)?)?;
    println!(
        "inferred imports for {} snippet(s) into {}",
        records.len(),
        out.display()
    );
    Ok(())
}

fn cmd_constraints(input: &Path) -> Result<(), CliError> {
    let source = fs::read_to_string(input)?;
    let stripped = snipinfer_core::snippet::strip_imports(&source).0;
    let unit = parse(&stripped)?;
    let extraction = extract_constraints(&unit);
    print!("{}", dump_constraints(&extraction));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_llm_eval(
    file: &FileConfig,
    endpoint: Option<String>,
    model: Option<String>,
    input: &Path,
    out: &Path,
    seed: u64,
    temperature: f64,
    jobs: Option<usize>,
    cache_dir: Option<PathBuf>,
    api_key_env: String,
    max_retries: u32,
    timeout_secs: u64,
) -> Result<(), CliError> {
    let shared = Effective::resolve(file, None, jobs, cache_dir, None, endpoint, model);
    let run_config = RunConfig {
        endpoint: shared.endpoint.clone(),
        model: shared.model.clone(),
        temperature,
        seed,
        max_retries,
        timeout: Duration::from_secs(timeout_secs),
        jobs: shared.jobs,
        cache_dir: shared.cache_dir.clone(),
        api_key_env,
    };
    if !run_config.is_reference_setting() {
        log::warn!(
            "temperature {} / seed {} differ from the reference settings (0, 1)",
            run_config.temperature,
            run_config.seed
        );
    }
    let corpus = load_corpus(input)?;
    let results = run_eval(&corpus, &run_config)?;
    save_results(out, &results)?;
    let errors = results.iter().filter(|r| r.error.is_some()).count();
    let hits = results.iter().filter(|r| r.cache_hit).count();
    println!(
        "queried {} for {} snippet(s): {} error(s), {} cache hit(s), results in {}",
        run_config.model,
        results.len(),
        errors,
        hits,
        out.display()
    );
    Ok(())
}

/// The part of a results record scoring cares about; extra fields from
/// either producer are ignored.
#[derive(Deserialize)]
struct ScoredInput {
    id: String,
    imports: ImportSet,
}

#[derive(Serialize)]
struct ScoreReport {
    #[serde(flatten)]
    eval: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    buckets: Option<Vec<BucketRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unlisted_types: Option<usize>,
}

/// Accepts a document-frequency table either bare or wrapped in a report
/// envelope.
fn load_freq_table(path: &Path) -> Result<DocFreqTable, CliError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let table = match value.get("report") {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(table)?)
}

fn cmd_score(
    file: &FileConfig,
    results_path: &Path,
    corpus_dir: &Path,
    out: &Path,
    freq: Option<&Path>,
    model: Option<String>,
    transform: Option<String>,
) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_dir)?;
    let text = fs::read_to_string(results_path)?;
    let results: Vec<ScoredInput> = serde_json::from_str(&text)?;

    let mut by_id: std::collections::BTreeMap<&str, &ImportSet> = std::collections::BTreeMap::new();
    for result in &results {
        if corpus.get(&result.id).is_none() {
            log::warn!("result id {:?} is not in the corpus; ignored", result.id);
            continue;
        }
        by_id.insert(&result.id, &result.imports);
    }

    let empty = ImportSet::new();
    let mut scores = Vec::with_capacity(corpus.len());
    let mut pairs = Vec::with_capacity(corpus.len());
    for snippet in corpus.snippets() {
        let inferred = by_id.get(snippet.id.as_str()).copied().unwrap_or(&empty);
        scores.push(score_snippet(&snippet.id, inferred, &snippet.ground_truth));
        pairs.push((inferred.clone(), snippet.ground_truth.clone()));
    }

    let meta = ReportMeta {
        model,
        corpus: Some(corpus.name.clone()),
        transform,
        seed: None,
    };
    let eval = aggregate(scores, meta);
    let (buckets, unlisted) = match freq {
        Some(freq_path) => {
            let table = load_freq_table(freq_path)?;
            let (rows, unlisted) = bucket_recall(&pairs, &table);
            (Some(rows), Some(unlisted))
        }
        None => (None, None),
    };

    let fmt = |v: Option<f64>| match v {
        Some(v) => format!("{:.4}", v),
        None => "undefined".to_string(),
    };
    println!(
        "scored {} snippet(s): micro P {} R {} F1 {}",
        eval.scores.len(),
        fmt(eval.micro.precision),
        fmt(eval.micro.recall),
        fmt(eval.micro.f1),
    );

    let report = ScoreReport {
        eval,
        buckets,
        unlisted_types: unlisted,
    };
    let mut inputs: Vec<&Path> = vec![results_path, corpus_dir];
    if let Some(freq_path) = freq {
        inputs.push(freq_path);
    }
    write_report(out, &effective(file), &inputs, report)?;
    Ok(())
}

/// Accepts a score report either bare or wrapped in a report envelope.
fn load_scores(path: &Path) -> Result<Vec<SnippetScore>, CliError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let report = match value.get("report") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let scores = report
        .get("scores")
        .ok_or_else(|| CliError::Msg(format!("{}: no scores array", path.display())))?;
    Ok(serde_json::from_value(scores.clone())?)
}

#[derive(Serialize)]
struct WilcoxonReport {
    metric: String,
    paired: usize,
    used: usize,
    skipped_undefined: usize,
    result: WilcoxonResult,
    significance: SigLevel,
    direction: &'static str,
}

fn cmd_wilcoxon(
    file: &FileConfig,
    a: &Path,
    b: &Path,
    metric: MetricArg,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scores_a = load_scores(a)?;
    let scores_b = load_scores(b)?;
    let b_by_id: std::collections::BTreeMap<&str, &SnippetScore> =
        scores_b.iter().map(|s| (s.id.as_str(), s)).collect();

    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut paired = 0;
    let mut skipped = 0;
    for score_a in &scores_a {
        let Some(score_b) = b_by_id.get(score_a.id.as_str()) else {
            continue;
        };
        paired += 1;
        match (metric.get(score_a), metric.get(score_b)) {
            (Some(x), Some(y)) => {
                before.push(x);
                after.push(y);
            }
            _ => skipped += 1,
        }
    }
    if paired == 0 {
        return Err(CliError::Msg(
            "no snippet ids in common between the two reports".to_string(),
        ));
    }

    let result = wilcoxon_signed_rank(&before, &after);
    let direction = if result.sum_differences > 0.0 {
        "improved"
    } else if result.sum_differences < 0.0 {
        "degraded"
    } else {
        "unchanged"
    };
    let significance = result.significance();
    match result.p_value {
        Some(p) => println!(
            "wilcoxon {} over {} pair(s): W = {}, p = {:.6}, {:?}, {}",
            metric.name(),
            result.n_effective,
            result.w,
            p,
            significance,
            direction
        ),
        None => println!(
            "wilcoxon {}: no nonzero differences across {} pair(s)",
            metric.name(),
            paired
        ),
    }

    if let Some(out) = out {
        let report = WilcoxonReport {
            metric: metric.name().to_string(),
            paired,
            used: before.len(),
            skipped_undefined: skipped,
            result,
            significance,
            direction,
        };
        write_report(out, &effective(file), &[a, b], report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LeakOut {
    #[serde(flatten)]
    report: leakage::LeakReport,
    shortlist: leakage::Shortlist,
}

fn cmd_leak_scan(
    file: &FileConfig,
    meta: &Path,
    names_path: &Path,
    min: u64,
    out: &Path,
    normalized: bool,
) -> Result<(), CliError> {
    let names = leakage::load_names(names_path)?;
    let mode = if normalized {
        MatchMode::Normalized
    } else {
        MatchMode::Exact
    };
    let mut scan_report = leakage::scan_path(meta, &names, mode)?;
    scan_report.threshold = min;
    let shortlist = leakage::shortlist(&scan_report, min);
    println!(
        "{} match(es) over {} record(s) ({} malformed); {} repo(s) and {} author(s) at {}+",
        scan_report.total_matches,
        scan_report.records_scanned,
        scan_report.malformed,
        shortlist.repos.len(),
        shortlist.authors.len(),
        min
    );
    for (repo, count) in shortlist.repos.iter().take(10) {
        println!("  {count:>6}  {repo}");
    }
    let leak_out = LeakOut {
        report: scan_report,
        shortlist,
    };
    write_report(out, &effective(file), &[meta, names_path], leak_out)?;
    Ok(())
}

fn cmd_freq(file: &FileConfig, root: &Path, corpus_dir: &Path, out: &Path) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_dir)?;
    let mut universe: Vec<Fqn> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for snippet in corpus.snippets() {
        for fqn in snippet.ground_truth.iter() {
            if seen.insert(fqn.clone()) {
                universe.push(fqn.clone());
            }
        }
    }
    let table = doc_freq(root, &universe, DEFAULT_EDGES.to_vec());
    println!(
        "scanned {} file(s) ({} unreadable) for {} type(s)",
        table.files_scanned,
        table.unreadable,
        universe.len()
    );
    write_report(out, &effective(file), &[corpus_dir], table)?;
    Ok(())
}
