//! Persistence: the instance CSV, the submission journal, split
//! bookkeeping, and [`DatasetStore`], which ties them to an evolution tree.
//!
//! A data directory holds `instances.csv` (seed and generated instances),
//! `submissions.jsonl` (the journal) and, optionally, `splits.json`.

mod csv_format;
mod journal;
mod splits;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::perturb::{ChildFields, EvolutionTree, PerturbError};
use crate::predict::Prediction;
use crate::text::{tokenize, validate_fields, InstanceId, Source, TokenSequence, Violation, WscInstance};

pub use csv_format::{export_csv, export_csv_bytes, import_csv, read_csv_file, write_csv_file, CsvRow, CSV_HEADER};
pub use journal::{Journal, Proposal, Submission, SubmissionStatus};
pub use splits::{allocate_families, DatasetName, SplitAllocation, SplitName, Splits};

pub const INSTANCES_FILE: &str = "instances.csv";
pub const JOURNAL_FILE: &str = "submissions.jsonl";
pub const SPLITS_FILE: &str = "splits.json";
pub const DATA_DIR_ENV: &str = "EVOGRAD_DATA_DIR";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("HeaderMismatch: expected {:?}, found {found:?}", CSV_HEADER.join(","))]
    HeaderMismatch { found: String },
    #[error("MalformedCsv: row {row}, column {column}: {reason}")]
    MalformedCsv { row: usize, column: String, reason: String },
    #[error("InvalidSubmission: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    InvalidSubmission(Vec<Violation>),
    #[error("UnknownSubmission: {0}")]
    UnknownSubmission(u64),
    #[error("UnknownParent: {0}")]
    UnknownParent(InstanceId),
    #[error("IllegalTransition: submission {id} is {} and cannot become {}", from.as_str(), to.as_str())]
    IllegalTransition { id: u64, from: SubmissionStatus, to: SubmissionStatus },
    #[error("CorruptJournal: line {line}: {reason}")]
    CorruptJournal { line: usize, reason: String },
    #[error("UnknownSplit: {0}")]
    UnknownSplit(String),
    #[error("SplitConflict: {0}")]
    SplitConflict(String),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error("Serialize: {0}")]
    Serialize(String),
    #[error("Io: {0}")]
    Io(String),
}

impl StoreError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        StoreError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Io(e.to_string())
    }
}

impl From<csv::Error> for StoreError {
    fn from(e: csv::Error) -> Self {
        StoreError::Io(e.to_string())
    }
}

fn sync_parent(path: &Path) {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        if let Ok(d) = fs::File::open(dir) {
            let _ = d.sync_all();
        }
    }
}

/// Write-then-rename so readers never observe a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    use std::io::Write;
    let tmp = path.with_extension(format!("{}.tmp", path.extension().and_then(|e| e.to_str()).unwrap_or("")));
    let mut f = fs::File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| StoreError::io(&tmp, e))?;
    f.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))?;
    sync_parent(path);
    Ok(())
}

/// Builds a tree from imported rows: seeds first, then the other rows as
/// adopted nodes carrying their recorded depth.
pub fn tree_from_instances(instances: &[WscInstance]) -> Result<EvolutionTree, StoreError> {
    let mut tree = EvolutionTree::new();
    for inst in instances.iter().filter(|i| i.is_seed()) {
        tree.add_root(inst.clone())?;
    }
    for inst in instances.iter().filter(|i| !i.is_seed()) {
        tree.adopt(inst.clone())?;
    }
    Ok(tree)
}

/// A data directory opened for reading and accepting submissions.
/// Single writer: wrap it in a lock to share it.
#[derive(Debug)]
pub struct DatasetStore {
    dir: PathBuf,
    base: Vec<InstanceId>,
    tree: EvolutionTree,
    journal: Journal,
    splits: Splits,
}

impl DatasetStore {
    /// Opens `dir`, creating it if needed, and replays accepted submissions
    /// into the tree under their recorded instance ids.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| StoreError::io(&dir, e))?;
        let instances_path = dir.join(INSTANCES_FILE);
        let instances = if instances_path.exists() { read_csv_file(&instances_path)? } else { Vec::new() };
        let mut tree = tree_from_instances(&instances)?;
        let journal = Journal::open(dir.join(JOURNAL_FILE))?;
        for sub in journal.accepted() {
            let tokens = sub_tokens(&sub.proposal)?;
            tree.derive_child(sub.proposal.parent_id, &tokens, fields(&sub.proposal), sub.instance_id)?;
        }
        let splits = Splits::load(dir.join(SPLITS_FILE))?;
        Ok(Self { dir, base: instances.iter().map(|i| i.id).collect(), tree, journal, splits })
    }

    /// Writes a fresh data directory holding `instances`.
    pub fn create(dir: impl AsRef<Path>, instances: &[WscInstance], splits: Option<&Splits>) -> Result<Self, StoreError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
        write_csv_file(dir.join(INSTANCES_FILE), instances)?;
        if let Some(s) = splits {
            s.save(dir.join(SPLITS_FILE))?;
        }
        Self::open(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn tree(&self) -> &EvolutionTree {
        &self.tree
    }

    pub fn journal(&self) -> &Journal {
        &self.journal
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    pub fn instance(&self, id: InstanceId) -> Option<&WscInstance> {
        self.tree.node(id).map(|n| &n.instance)
    }

    /// All instances ordered by id.
    pub fn instances(&self) -> Vec<WscInstance> {
        self.tree.instances().cloned().collect()
    }

    /// Checks a proposal against its parent and returns the depth it would
    /// have. Reports every structural violation at once.
    pub fn preview(&mut self, proposal: &Proposal) -> Result<u32, StoreError> {
        let tokens = tokenize(&proposal.sentence).unwrap_or_default();
        let violations = validate_fields(&tokens, &proposal.option1, &proposal.option2);
        if !violations.is_empty() {
            return Err(StoreError::InvalidSubmission(violations));
        }
        if !self.tree.contains(proposal.parent_id) {
            return Err(StoreError::UnknownParent(proposal.parent_id));
        }
        match self.tree.preview_child(proposal.parent_id, &tokens, fields(proposal)) {
            Ok(node) => Ok(node.depth()),
            Err(PerturbError::InvalidChild(v)) => Err(StoreError::InvalidSubmission(v)),
            Err(e) => Err(e.into()),
        }
    }

    /// Journals a pending submission (durably) with its frozen prediction.
    pub fn submit(&mut self, proposal: Proposal, prediction: Prediction) -> Result<Submission, StoreError> {
        let depth = self.preview(&proposal)?;
        self.journal.append(proposal, depth, prediction)
    }

    /// Accepting registers the proposal as an instance in the tree.
    pub fn set_status(&mut self, id: u64, status: SubmissionStatus) -> Result<Submission, StoreError> {
        let sub = self.journal.get(id).ok_or(StoreError::UnknownSubmission(id))?;
        if sub.status != SubmissionStatus::Pending || status == SubmissionStatus::Pending {
            return Err(StoreError::IllegalTransition { id, from: sub.status, to: status });
        }
        if status == SubmissionStatus::Rejected {
            return self.journal.set_status(id, status, None);
        }
        let tokens = sub_tokens(&sub.proposal)?;
        // Check first so a failing child never reaches the journal.
        self.tree.preview_child(sub.proposal.parent_id, &tokens, fields(&sub.proposal))?;
        let instance_id = self.tree.peek_next_id();
        let updated = self.journal.set_status(id, status, Some(instance_id))?;
        self.tree.derive_child(sub.proposal.parent_id, &tokens, fields(&sub.proposal), Some(instance_id))?;
        Ok(updated)
    }

    /// Export order: the rows of `instances.csv`, then accepted
    /// submissions in acceptance order.
    pub fn export_instances(&self) -> Vec<WscInstance> {
        let accepted = self.journal.accepted().into_iter().filter_map(|s| s.instance_id);
        self.base.iter().copied().chain(accepted).filter_map(|id| self.instance(id).cloned()).collect()
    }

    pub fn export_csv_bytes(&self) -> Vec<u8> {
        export_csv_bytes(&self.export_instances())
    }

    /// Instances filtered by split membership, ordered by id.
    pub fn select(&self, dataset: Option<DatasetName>, split: Option<SplitName>) -> Vec<WscInstance> {
        if dataset.is_none() && split.is_none() {
            return self.instances();
        }
        let ids = self.splits.ids(dataset, split);
        ids.into_iter().filter_map(|id| self.instance(id).cloned()).collect()
    }
}

fn sub_tokens(p: &Proposal) -> Result<TokenSequence, StoreError> {
    tokenize(&p.sentence).map_err(|_| StoreError::InvalidSubmission(vec![Violation::MissingBlank]))
}

fn fields(p: &Proposal) -> ChildFields {
    ChildFields {
        option1: Some(p.option1.clone()),
        option2: Some(p.option2.clone()),
        answer: Some(p.answer),
        source: Some(Source::Human),
    }
}
