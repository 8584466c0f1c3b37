//! Append-only JSON-lines submission journal.
//!
//! Two record kinds share the file: a `submission` line holding the
//! proposal as submitted, and a `status` line recording a later decision.
//! Proposal lines are never rewritten. Every append is fsynced before the
//! caller sees the id. On open, an unterminated final line that does not
//! parse (a torn write) is cut off.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::predict::Prediction;
use crate::text::{Choice, InstanceId};

use super::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionStatus {
    Pending,
    Accepted,
    Rejected,
}

impl SubmissionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SubmissionStatus::Pending => "pending",
            SubmissionStatus::Accepted => "accepted",
            SubmissionStatus::Rejected => "rejected",
        }
    }
}

/// A proposed instance as typed by a contributor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub parent_id: InstanceId,
    pub sentence: String,
    pub option1: String,
    pub option2: String,
    pub answer: Choice,
    #[serde(default)]
    pub submitter: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub id: u64,
    #[serde(flatten)]
    pub proposal: Proposal,
    /// Depth computed against the parent when the proposal arrived.
    pub depth: u32,
    pub prediction: Prediction,
    pub status: SubmissionStatus,
    /// Set once accepted.
    pub instance_id: Option<InstanceId>,
    pub created_ms: u64,
    pub updated_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StatusEvent {
    id: u64,
    status: SubmissionStatus,
    instance_id: Option<InstanceId>,
    at_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Entry {
    Submission(Submission),
    Status(StatusEvent),
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Debug)]
struct State {
    file: File,
    submissions: BTreeMap<u64, Submission>,
    /// Submission ids in the order they were accepted.
    accepted: Vec<u64>,
    next_id: u64,
}

impl State {
    fn apply(&mut self, entry: Entry, line: usize) -> Result<(), StoreError> {
        match entry {
            Entry::Submission(s) => {
                if s.id != self.next_id {
                    return Err(StoreError::CorruptJournal { line, reason: format!("expected id {}, found {}", self.next_id, s.id) });
                }
                self.next_id += 1;
                self.submissions.insert(s.id, s);
            }
            Entry::Status(ev) => {
                let sub = self
                    .submissions
                    .get_mut(&ev.id)
                    .ok_or_else(|| StoreError::CorruptJournal { line, reason: format!("status for unknown submission {}", ev.id) })?;
                sub.status = ev.status;
                sub.instance_id = ev.instance_id;
                sub.updated_ms = ev.at_ms;
                if ev.status == SubmissionStatus::Accepted {
                    self.accepted.push(ev.id);
                }
            }
        }
        Ok(())
    }

    fn write(&mut self, entry: &Entry) -> Result<(), StoreError> {
        let mut line = serde_json::to_vec(entry).map_err(|e| StoreError::Serialize(e.to_string()))?;
        line.push(b'\n');
        self.file.write_all(&line).map_err(StoreError::from)?;
        self.file.sync_data().map_err(StoreError::from)
    }
}

#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    state: Mutex<State>,
}

impl Journal {
    /// Opens or creates the journal, replaying every complete record.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let existed = path.exists();
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(|e| StoreError::io(&path, e))?;
        if !existed {
            super::sync_parent(&path);
        }
        let bytes = std::fs::read(&path).map_err(|e| StoreError::io(&path, e))?;

        let mut state = State { file: file.try_clone().map_err(StoreError::from)?, submissions: BTreeMap::new(), accepted: Vec::new(), next_id: 1 };
        let mut good_len = 0usize;
        let mut start = 0usize;
        let mut line_no = 0usize;
        while start < bytes.len() {
            line_no += 1;
            let end = bytes[start..].iter().position(|&b| b == b'\n').map(|p| start + p);
            // An unterminated tail was never acknowledged; dropping it loses nothing.
            let Some(end) = end else { break };
            let raw = &bytes[start..end];
            if !raw.iter().all(u8::is_ascii_whitespace) {
                let entry = serde_json::from_slice::<Entry>(raw)
                    .map_err(|e| StoreError::CorruptJournal { line: line_no, reason: e.to_string() })?;
                state.apply(entry, line_no)?;
            }
            start = end + 1;
            good_len = start;
        }
        if good_len < bytes.len() {
            file.set_len(good_len as u64).map_err(|e| StoreError::io(&path, e))?;
            file.sync_data().map_err(|e| StoreError::io(&path, e))?;
        }
        file.seek(SeekFrom::End(0)).map_err(|e| StoreError::io(&path, e))?;
        Ok(Self { path, state: Mutex::new(state) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Persists a pending submission and returns it with its id.
    pub fn append(&self, proposal: Proposal, depth: u32, prediction: Prediction) -> Result<Submission, StoreError> {
        let mut state = self.lock();
        let now = now_ms();
        let sub = Submission {
            id: state.next_id,
            proposal,
            depth,
            prediction,
            status: SubmissionStatus::Pending,
            instance_id: None,
            created_ms: now,
            updated_ms: now,
        };
        let entry = Entry::Submission(sub);
        state.write(&entry)?;
        let Entry::Submission(sub) = entry else { unreachable!() };
        state.next_id += 1;
        state.submissions.insert(sub.id, sub.clone());
        Ok(sub)
    }

    /// Moves a pending submission to accepted or rejected.
    pub fn set_status(&self, id: u64, status: SubmissionStatus, instance_id: Option<InstanceId>) -> Result<Submission, StoreError> {
        let mut state = self.lock();
        let current = state.submissions.get(&id).ok_or(StoreError::UnknownSubmission(id))?.status;
        if current != SubmissionStatus::Pending || status == SubmissionStatus::Pending {
            return Err(StoreError::IllegalTransition { id, from: current, to: status });
        }
        let instance_id = if status == SubmissionStatus::Accepted { instance_id } else { None };
        let ev = StatusEvent { id, status, instance_id, at_ms: now_ms() };
        state.write(&Entry::Status(ev.clone()))?;
        state.apply(Entry::Status(ev), 0)?;
        Ok(state.submissions[&id].clone())
    }

    pub fn get(&self, id: u64) -> Option<Submission> {
        self.lock().submissions.get(&id).cloned()
    }

    pub fn submissions(&self) -> Vec<Submission> {
        self.lock().submissions.values().cloned().collect()
    }

    /// Accepted submissions in acceptance order.
    pub fn accepted(&self) -> Vec<Submission> {
        let state = self.lock();
        state.accepted.iter().map(|id| state.submissions[id].clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.lock().submissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
