use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::align::{align, AlignStep};
use super::PerturbError;
use crate::text::{detokenize, validate_instance, Choice, InstanceId, Source, Token, TokenSequence, WscInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    Substitute,
    Insert,
    Remove,
}

/// One application of the perturbation function, in the coordinates of the
/// sentence it is applied to.
///
/// `Substitute` may carry several tokens when a single lexical unit expands
/// to more than one token (a multiword synonym); it still counts as one
/// perturbation event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub kind: PerturbationKind,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tokens: Vec<Token>,
}

impl PerturbationRecord {
    pub fn substitute(index: usize, token: Token) -> Self {
        Self { kind: PerturbationKind::Substitute, index, tokens: vec![token] }
    }

    pub fn substitute_phrase(index: usize, tokens: Vec<Token>) -> Self {
        Self { kind: PerturbationKind::Substitute, index, tokens }
    }

    pub fn insert(index: usize, token: Token) -> Self {
        Self { kind: PerturbationKind::Insert, index, tokens: vec![token] }
    }

    pub fn remove(index: usize) -> Self {
        Self { kind: PerturbationKind::Remove, index, tokens: Vec::new() }
    }

    pub fn new_token(&self) -> Option<&Token> {
        self.tokens.first()
    }

    fn check_shape(&self) -> Result<(), PerturbError> {
        let ok = match self.kind {
            PerturbationKind::Substitute => !self.tokens.is_empty(),
            PerturbationKind::Insert => self.tokens.len() == 1,
            PerturbationKind::Remove => self.tokens.is_empty(),
        };
        if !ok {
            return Err(PerturbError::MalformedRecord(format!(
                "{:?} cannot carry {} token(s)",
                self.kind,
                self.tokens.len()
            )));
        }
        if self.tokens.iter().any(Token::is_blank) {
            return Err(PerturbError::MalformedRecord("replacement tokens may not contain the blank".into()));
        }
        Ok(())
    }
}

/// Stable coordinate for a token: either its position in the sentence the
/// family was grown from, or a fresh id minted when the token was inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    Root(usize),
    Fresh(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionNode {
    pub instance: WscInstance,
    /// Edits from the parent sentence, applied in order. Empty for roots.
    pub records: Vec<PerturbationRecord>,
    pub perturbed_roots: BTreeSet<Marker>,
    /// One marker per current token position.
    pub provenance: Vec<Marker>,
    /// Depth carried in from outside the tree (imported rows whose edit
    /// history is not known). Zero for nodes grown here.
    pub base_depth: u32,
}

impl EvolutionNode {
    pub fn id(&self) -> InstanceId {
        self.instance.id
    }

    pub fn depth(&self) -> u32 {
        self.base_depth + self.perturbed_roots.len() as u32
    }

    /// True when the node's sentence is known verbatim rather than derived
    /// from its parent by recorded edits.
    pub fn is_anchor(&self) -> bool {
        self.records.is_empty()
    }
}

/// Scratch state used while applying records.
#[derive(Debug, Clone)]
struct Working {
    tokens: Vec<Token>,
    provenance: Vec<Marker>,
    roots: BTreeSet<Marker>,
}

/// Read-only snapshot of a tree; cheap to clone and share across threads.
#[derive(Debug, Clone, Default)]
pub struct TreeView {
    nodes: Arc<BTreeMap<InstanceId, Arc<EvolutionNode>>>,
}

impl TreeView {
    pub fn node(&self, id: InstanceId) -> Option<&Arc<EvolutionNode>> {
        self.nodes.get(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Arc<EvolutionNode>> {
        self.nodes.values()
    }
}

/// A forest of evolution trees keyed by instance id. One writer; readers
/// take [`TreeView`] snapshots, which are copy-on-write.
#[derive(Debug, Clone, Default)]
pub struct EvolutionTree {
    view: TreeView,
    next_id: u64,
    next_marker: u64,
}

impl EvolutionTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tree holding a single seed.
    pub fn with_root(instance: WscInstance) -> Result<(Self, InstanceId), PerturbError> {
        let mut tree = Self::new();
        let id = tree.add_root(instance)?;
        Ok((tree, id))
    }

    pub fn snapshot(&self) -> TreeView {
        self.view.clone()
    }

    pub fn len(&self) -> usize {
        self.view.len()
    }

    pub fn is_empty(&self) -> bool {
        self.view.is_empty()
    }

    pub fn node(&self, id: InstanceId) -> Option<&Arc<EvolutionNode>> {
        self.view.node(id)
    }

    pub fn contains(&self, id: InstanceId) -> bool {
        self.view.nodes.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Arc<EvolutionNode>> {
        self.view.nodes()
    }

    pub fn instances(&self) -> impl Iterator<Item = &WscInstance> {
        self.view.nodes().map(|n| &n.instance)
    }

    /// Id the next derived node will receive.
    pub fn peek_next_id(&self) -> InstanceId {
        InstanceId(self.next_id)
    }

    /// Registers a depth-0 seed.
    pub fn add_root(&mut self, instance: WscInstance) -> Result<InstanceId, PerturbError> {
        if instance.depth != 0 || instance.parent_id.is_some() {
            return Err(PerturbError::MalformedRecord(format!("root {} must have depth 0 and no parent", instance.id)));
        }
        self.anchor(instance)
    }

    /// Registers an instance whose depth was recorded elsewhere (an imported
    /// CSV row). It becomes a replay anchor: its own token positions act as
    /// root markers for anything grown beneath it, and its recorded depth is
    /// carried as the base.
    pub fn adopt(&mut self, instance: WscInstance) -> Result<InstanceId, PerturbError> {
        if let Some(parent) = instance.parent_id {
            if !self.contains(parent) {
                return Err(PerturbError::UnknownParent(parent));
            }
        }
        self.anchor(instance)
    }

    fn anchor(&mut self, instance: WscInstance) -> Result<InstanceId, PerturbError> {
        validate_instance(&instance).map_err(PerturbError::InvalidChild)?;
        let id = instance.id;
        if self.contains(id) {
            return Err(PerturbError::DuplicateId(id));
        }
        let provenance = (1..=instance.tokens.len()).map(Marker::Root).collect();
        let node = EvolutionNode {
            base_depth: instance.depth,
            instance,
            records: Vec::new(),
            perturbed_roots: BTreeSet::new(),
            provenance,
        };
        self.next_id = self.next_id.max(id.0 + 1);
        Arc::make_mut(&mut self.view.nodes).insert(id, Arc::new(node));
        Ok(id)
    }

    fn parent(&self, id: InstanceId) -> Result<&Arc<EvolutionNode>, PerturbError> {
        self.node(id).ok_or(PerturbError::UnknownParent(id))
    }

    fn apply_one(&mut self, work: &mut Working, record: &PerturbationRecord) -> Result<(), PerturbError> {
        record.check_shape()?;
        let len = work.tokens.len();
        let max_index = if record.kind == PerturbationKind::Insert { len + 1 } else { len };
        if record.index == 0 || record.index > max_index {
            return Err(PerturbError::BadIndex { index: record.index, len });
        }
        let at = record.index - 1;
        match record.kind {
            PerturbationKind::Substitute => {
                if work.tokens[at].is_blank() {
                    return Err(PerturbError::BlankEdit { index: record.index });
                }
                let marker = work.provenance[at];
                work.roots.insert(marker);
                let n = record.tokens.len();
                work.tokens.splice(at..=at, record.tokens.iter().cloned());
                // Every token of a phrase replacement shares the replaced marker.
                work.provenance.splice(at..=at, std::iter::repeat_n(marker, n));
            }
            PerturbationKind::Insert => {
                let marker = Marker::Fresh(self.next_marker);
                self.next_marker += 1;
                work.roots.insert(marker);
                work.tokens.insert(at, record.tokens[0].clone());
                work.provenance.insert(at, marker);
            }
            PerturbationKind::Remove => {
                if work.tokens[at].is_blank() {
                    return Err(PerturbError::BlankEdit { index: record.index });
                }
                work.roots.insert(work.provenance[at]);
                work.tokens.remove(at);
                work.provenance.remove(at);
            }
        }
        Ok(())
    }

    fn build_child(
        &mut self,
        parent_id: InstanceId,
        records: Vec<PerturbationRecord>,
        fields: ChildFields,
    ) -> Result<EvolutionNode, PerturbError> {
        let parent = Arc::clone(self.parent(parent_id)?);
        let mut work = Working {
            tokens: parent.instance.tokens.tokens().to_vec(),
            provenance: parent.provenance.clone(),
            roots: parent.perturbed_roots.clone(),
        };
        let saved_marker = self.next_marker;
        for record in &records {
            if let Err(e) = self.apply_one(&mut work, record) {
                self.next_marker = saved_marker;
                return Err(e);
            }
        }
        let instance = WscInstance {
            id: InstanceId(self.next_id),
            tokens: TokenSequence::new(work.tokens),
            option1: fields.option1.unwrap_or_else(|| parent.instance.option1.clone()),
            option2: fields.option2.unwrap_or_else(|| parent.instance.option2.clone()),
            answer: fields.answer.unwrap_or(parent.instance.answer),
            depth: parent.base_depth + work.roots.len() as u32,
            parent_id: Some(parent_id),
            source: fields.source.unwrap_or(parent.instance.source),
        };
        if let Err(v) = validate_instance(&instance) {
            self.next_marker = saved_marker;
            return Err(PerturbError::InvalidChild(v));
        }
        Ok(EvolutionNode {
            instance,
            records,
            perturbed_roots: work.roots,
            provenance: work.provenance,
            base_depth: parent.base_depth,
        })
    }

    fn register(&mut self, node: EvolutionNode) -> Arc<EvolutionNode> {
        let node = Arc::new(node);
        self.next_id = self.next_id.max(node.id().0 + 1);
        Arc::make_mut(&mut self.view.nodes).insert(node.id(), Arc::clone(&node));
        node
    }

    /// Applies one perturbation to `parent_id` and registers the child.
    /// Re-editing an already perturbed position leaves the depth unchanged.
    pub fn apply_perturbation(
        &mut self,
        parent_id: InstanceId,
        record: PerturbationRecord,
    ) -> Result<Arc<EvolutionNode>, PerturbError> {
        self.apply_with(parent_id, vec![record], ChildFields::default())
    }

    /// Applies a sequence of records as one child, optionally overriding the
    /// instance fields that are not part of the sentence.
    pub fn apply_with(
        &mut self,
        parent_id: InstanceId,
        records: Vec<PerturbationRecord>,
        fields: ChildFields,
    ) -> Result<Arc<EvolutionNode>, PerturbError> {
        let node = self.build_child(parent_id, records, fields)?;
        Ok(self.register(node))
    }

    /// Infers the edit records turning the parent's sentence into `tokens`
    /// from the minimal alignment and computes the resulting node without
    /// registering it.
    pub fn preview_child(
        &mut self,
        parent_id: InstanceId,
        tokens: &TokenSequence,
        fields: ChildFields,
    ) -> Result<EvolutionNode, PerturbError> {
        let parent = Arc::clone(self.parent(parent_id)?);
        let records = records_from_alignment(&parent.instance.tokens, tokens);
        let saved = self.next_marker;
        let node = self.build_child(parent_id, records, fields);
        // Previews never consume marker ids.
        self.next_marker = saved;
        node
    }

    /// Like [`Self::preview_child`] but registers the node under `id` (or the
    /// next free id).
    pub fn derive_child(
        &mut self,
        parent_id: InstanceId,
        tokens: &TokenSequence,
        fields: ChildFields,
        id: Option<InstanceId>,
    ) -> Result<Arc<EvolutionNode>, PerturbError> {
        let parent = Arc::clone(self.parent(parent_id)?);
        let records = records_from_alignment(&parent.instance.tokens, tokens);
        let mut node = self.build_child(parent_id, records, fields)?;
        if let Some(id) = id {
            if self.contains(id) {
                return Err(PerturbError::DuplicateId(id));
            }
            node.instance.id = id;
        }
        Ok(self.register(node))
    }

    pub fn evolution_depth(&self, id: InstanceId) -> Result<u32, PerturbError> {
        self.node(id).map(|n| n.depth()).ok_or(PerturbError::UnknownNode(id))
    }

    /// Path from the nearest anchor (a root, or an adopted node) down to
    /// `id`. Replaying each node's records in order reproduces the sentence.
    pub fn lineage(&self, id: InstanceId) -> Result<Vec<Arc<EvolutionNode>>, PerturbError> {
        let mut path = Vec::new();
        let mut cur = self.node(id).ok_or(PerturbError::UnknownNode(id))?;
        loop {
            path.push(Arc::clone(cur));
            if cur.is_anchor() {
                break;
            }
            let parent = cur.instance.parent_id.ok_or(PerturbError::UnknownNode(id))?;
            cur = self.node(parent).ok_or(PerturbError::UnknownParent(parent))?;
        }
        path.reverse();
        Ok(path)
    }

    /// Follows parent links to the top of the family.
    pub fn root_of(&self, id: InstanceId) -> Result<InstanceId, PerturbError> {
        let mut cur = self.node(id).ok_or(PerturbError::UnknownNode(id))?;
        while let Some(parent) = cur.instance.parent_id {
            match self.node(parent) {
                Some(p) => cur = p,
                None => break,
            }
        }
        Ok(cur.id())
    }
}

/// Instance fields a child may override; `None` copies the parent's value.
/// Option edits never count toward depth.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChildFields {
    pub option1: Option<String>,
    pub option2: Option<String>,
    pub answer: Option<Choice>,
    pub source: Option<Source>,
}

/// Turns a minimal alignment into records that can be applied one after
/// another. Steps are emitted right to left so earlier indices stay valid.
pub fn records_from_alignment(parent: &TokenSequence, child: &TokenSequence) -> Vec<PerturbationRecord> {
    let steps = align(parent, child);
    let mut records = Vec::new();
    for step in steps.iter().rev() {
        match *step {
            AlignStep::Keep { .. } => {}
            AlignStep::Substitute { a, b } => {
                records.push(PerturbationRecord::substitute(a, child.tokens()[b - 1].clone()))
            }
            AlignStep::Delete { a } => records.push(PerturbationRecord::remove(a)),
            AlignStep::Insert { before, b } => {
                records.push(PerturbationRecord::insert(before, child.tokens()[b - 1].clone()))
            }
        }
    }
    records
}

/// Applies records to a bare token sequence with no bookkeeping. Used to
/// check that a lineage replays to the stored sentence.
pub fn replay_records(start: &TokenSequence, records: &[PerturbationRecord]) -> Result<TokenSequence, PerturbError> {
    let mut tokens = start.tokens().to_vec();
    for record in records {
        record.check_shape()?;
        let len = tokens.len();
        let max_index = if record.kind == PerturbationKind::Insert { len + 1 } else { len };
        if record.index == 0 || record.index > max_index {
            return Err(PerturbError::BadIndex { index: record.index, len });
        }
        let at = record.index - 1;
        match record.kind {
            PerturbationKind::Substitute => {
                tokens.splice(at..=at, record.tokens.iter().cloned());
            }
            PerturbationKind::Insert => tokens.insert(at, record.tokens[0].clone()),
            PerturbationKind::Remove => {
                tokens.remove(at);
            }
        }
    }
    Ok(TokenSequence::new(tokens))
}

/// Replays a lineage from its anchor and returns the resulting sentence.
pub fn replay_lineage(path: &[Arc<EvolutionNode>]) -> Result<String, PerturbError> {
    let Some(first) = path.first() else {
        return Ok(String::new());
    };
    let mut seq = first.instance.tokens.clone();
    for node in &path[1..] {
        seq = replay_records(&seq, &node.records)?;
    }
    Ok(detokenize(&seq))
}
