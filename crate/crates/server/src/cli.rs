//! `evograd` command line. Exit codes: 0 success, 1 domain error (one line
//! on stderr, starting with the error name), 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use evograd::analysis::{classify_edits, EditOp, PerturbationHistogram};
use evograd::augment::{batch_augment, AugmentationConfig};
use evograd::eval::{evaluate, EvaluateOptions};
use evograd::perturb::{ChildFields, EvolutionTree, PerturbationRecord};
use evograd::predict::{load_records, Predictor, RemoteConfig, RemotePredictor, StubPredictor};
use evograd::store::{read_csv_file, tree_from_instances, write_csv_file, DatasetStore, INSTANCES_FILE, JOURNAL_FILE};
use evograd::text::{Choice, InstanceId, Token, WscInstance};
use evograd::wordnet::{load_lexicon, Lexicon};

use crate::api::{self, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "evograd", version, about = "Evolve, augment, analyze and evaluate Winograd-style datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Op {
    Sub,
    Ins,
    Del,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply one perturbation to an instance of a CSV and append the child.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to rewriting the input.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parent: u64,
        #[arg(long, value_enum)]
        op: Op,
        /// 1-based token position.
        #[arg(long)]
        index: usize,
        #[arg(long)]
        token: Option<String>,
        /// Answer of the child (1 or 2); defaults to the parent's.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        answer: Option<u8>,
    },
    /// Append WordNet synonym variants of every row.
    Augment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        wordnet: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        factor: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        max_attempts: u64,
    },
    /// Predict every row and write the evaluation report.
    Evaluate {
        #[arg(long = "in")]
        input: PathBuf,
        /// stub, replay:<csv> or remote:<url>
        #[arg(long, default_value = "stub")]
        predictor: String,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Improves part-of-speech tags in the perturbation histogram.
        #[arg(long)]
        wordnet: Option<PathBuf>,
        #[arg(long)]
        dataset_name: Option<String>,
    },
    /// Classify every row's edits against its seed by part of speech.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        wordnet: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the data directory's dataset CSV (stdout without --out).
    Export {
        #[arg(long, env = "EVOGRAD_DATA_DIR")]
        data_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Initialize a data directory from a dataset CSV.
    Import {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, env = "EVOGRAD_DATA_DIR")]
        data_dir: PathBuf,
        /// Replace an existing instances file (refused once submissions exist).
        #[arg(long)]
        force: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "EVOGRAD_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long, env = "EVOGRAD_DATA_DIR")]
        data_dir: PathBuf,
        #[arg(long, env = "EVOGRAD_MODEL_ENDPOINT")]
        model_endpoint: Option<String>,
        #[arg(long, env = "EVOGRAD_ADMIN_TOKEN")]
        admin_token: Option<String>,
        /// Prediction records served as the "replay" model.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Store(#[from] evograd::store::StoreError),
    #[error(transparent)]
    Perturb(#[from] evograd::perturb::PerturbError),
    #[error(transparent)]
    Augment(#[from] evograd::augment::AugmentError),
    #[error(transparent)]
    Eval(#[from] evograd::eval::EvalError),
    #[error(transparent)]
    Predict(#[from] evograd::predict::PredictError),
    #[error(transparent)]
    Wordnet(#[from] evograd::wordnet::WordnetError),
    #[error(transparent)]
    Text(#[from] evograd::text::TextError),
    #[error(transparent)]
    Serve(#[from] api::ServeError),
    #[error("Usage: {0}")]
    Usage(String),
    #[error("AlreadyExists: {0}")]
    AlreadyExists(String),
    #[error("Io: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evolve { input, out, parent, op, index, token, answer } => {
            evolve(&input, out.as_deref(), parent, op, index, token, answer.and_then(Choice::from_number))
        }
        Command::Augment { input, out, wordnet, seed, factor, max_attempts } => {
            augment(&input, &out, &wordnet, seed, factor as usize, max_attempts as usize)
        }
        Command::Evaluate { input, predictor, report, summary, wordnet, dataset_name } => {
            run_evaluate(&input, &predictor, &report, summary.as_deref(), wordnet.as_deref(), dataset_name)
        }
        Command::Analyze { input, wordnet, out } => analyze(&input, &wordnet, &out),
        Command::Export { data_dir, out } => export(&data_dir, out.as_deref()),
        Command::Import { input, data_dir, force } => import(&input, &data_dir, force),
        Command::Serve { bind, data_dir, model_endpoint, admin_token, replay } => {
            serve(ServiceConfig { bind, data_dir, model_endpoint, replay_records: replay, admin_token })
        }
    }
}

fn evolve(
    input: &Path,
    out: Option<&Path>,
    parent: u64,
    op: Op,
    index: usize,
    token: Option<String>,
    answer: Option<Choice>,
) -> Result<(), CliError> {
    let rows = read_csv_file(input)?;
    let mut tree = tree_from_instances(&rows)?;
    let word = || -> Result<Token, CliError> {
        let t = token.as_deref().ok_or_else(|| CliError::Usage(format!("--op {op:?} needs --token").to_lowercase()))?;
        Ok(Token::classify(t)?)
    };
    let record = match op {
        Op::Sub => PerturbationRecord::substitute(index, word()?),
        Op::Ins => PerturbationRecord::insert(index, word()?),
        Op::Del => PerturbationRecord::remove(index),
    };
    let fields = ChildFields { answer, ..ChildFields::default() };
    let node = tree.apply_with(InstanceId(parent), vec![record], fields)?;
    let mut all = rows;
    all.push(node.instance.clone());
    write_csv_file(out.unwrap_or(input), &all)?;
    println!("{}\t{}\tdepth={}", all.len() - 1, node.instance.sentence(), node.depth());
    Ok(())
}

fn augment(input: &Path, out: &Path, wordnet: &Path, seed: u64, factor: usize, max_attempts: usize) -> Result<(), CliError> {
    let rows = read_csv_file(input)?;
    let lex = load_lexicon(wordnet)?;
    let mut tree = tree_from_instances(&rows)?;
    let cfg = AugmentationConfig { factor, max_attempts, ..AugmentationConfig::with_seed(seed) };
    let (made, summary) = batch_augment(&rows, &lex, &cfg, &mut tree)?;
    let mut all = rows;
    all.extend(made.iter().map(|a| a.node.instance.clone()));
    write_csv_file(out, &all)?;
    println!(
        "inputs={} attempted={} produced={} skipped={} config={}",
        summary.inputs,
        summary.attempted,
        summary.produced,
        summary.skipped,
        &cfg.fingerprint()[..16]
    );
    Ok(())
}

fn build_predictor(spec: &str) -> Result<Arc<dyn Predictor>, CliError> {
    if spec == StubPredictor::NAME {
        return Ok(Arc::new(StubPredictor));
    }
    if let Some(path) = spec.strip_prefix("replay:") {
        return Ok(Arc::new(load_records(path)?));
    }
    if let Some(url) = spec.strip_prefix("remote:") {
        return Ok(Arc::new(RemotePredictor::new("remote", RemoteConfig::new(url))?));
    }
    Err(CliError::Usage(format!("--predictor must be stub, replay:<csv> or remote:<url>, got {spec:?}")))
}

fn run_evaluate(
    input: &Path,
    predictor: &str,
    report_path: &Path,
    summary: Option<&Path>,
    wordnet: Option<&Path>,
    dataset_name: Option<String>,
) -> Result<(), CliError> {
    let predictor = build_predictor(predictor)?;
    let rows = read_csv_file(input)?;
    let tree = tree_from_instances(&rows)?;
    let lex = match wordnet {
        Some(dir) => load_lexicon(dir)?,
        None => Lexicon::default(),
    };
    let name = dataset_name.unwrap_or_else(|| input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let options = EvaluateOptions { dataset_name: name, ..Default::default() };
    let report = evaluate(&rows, &tree, predictor.as_ref(), &lex, &options)?;
    write_file(report_path, format!("{}\n", report.to_json()).as_bytes())?;
    if let Some(path) = summary {
        write_file(path, report.summary_csv().as_bytes())?;
    }
    let ed = report.mean_error_depth.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
    println!("accuracy={:.3} mean_error_depth={ed} excluded_families={}", report.accuracy, report.excluded_families);
    Ok(())
}

#[derive(Serialize)]
struct AnalyzedInstance {
    id: InstanceId,
    seed_id: InstanceId,
    depth: u32,
    edits: Vec<EditOp>,
}

#[derive(Serialize)]
struct Analysis {
    instances: Vec<AnalyzedInstance>,
    histogram: PerturbationHistogram,
    top3: String,
}

fn analyze(input: &Path, wordnet: &Path, out: &Path) -> Result<(), CliError> {
    let rows = read_csv_file(input)?;
    let lex = load_lexicon(wordnet)?;
    let tree: EvolutionTree = tree_from_instances(&rows)?;
    let mut histogram = PerturbationHistogram::new();
    let mut instances = Vec::new();
    for inst in rows.iter().filter(|i| !i.is_seed()) {
        let seed_id = tree.root_of(inst.id)?;
        let seed: &WscInstance = &tree.node(seed_id).expect("root is in the tree").instance;
        let edits = classify_edits(&lex, &seed.tokens, &inst.tokens);
        histogram.add_all(&edits);
        instances.push(AnalyzedInstance { id: inst.id, seed_id, depth: inst.depth, edits });
    }
    let top3 = histogram.format_top(3);
    let json = serde_json::to_string_pretty(&Analysis { instances, histogram, top3: top3.clone() }).expect("analysis serializes");
    write_file(out, format!("{json}\n").as_bytes())?;
    println!("{top3}");
    Ok(())
}

fn export(data_dir: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let store = DatasetStore::open(data_dir)?;
    let bytes = store.export_csv_bytes();
    match out {
        Some(path) => write_file(path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn import(input: &Path, data_dir: &Path, force: bool) -> Result<(), CliError> {
    let rows = read_csv_file(input)?;
    let target = data_dir.join(INSTANCES_FILE);
    if target.exists() && !force {
        return Err(CliError::AlreadyExists(format!("{} exists; pass --force to replace it", target.display())));
    }
    let journal = data_dir.join(JOURNAL_FILE);
    if journal.metadata().map(|m| m.len() > 0).unwrap_or(false) {
        return Err(CliError::AlreadyExists(format!("{} has submissions; import into a fresh directory", journal.display())));
    }
    let store = DatasetStore::create(data_dir, &rows, None)?;
    println!("imported {} instances into {}", store.export_instances().len(), data_dir.display());
    Ok(())
}

fn serve(cfg: ServiceConfig) -> Result<(), CliError> {
    // Built outside the runtime: the blocking remote client may not be
    // created or dropped on a runtime thread.
    let state = Arc::new(AppState::from_config(&cfg)?);
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| CliError::Io(e.to_string()))?;
    let result = runtime.block_on(api::serve(Arc::clone(&state), cfg.bind, |addr| {
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
    }));
    drop(runtime);
    drop(state);
    Ok(result?)
}
