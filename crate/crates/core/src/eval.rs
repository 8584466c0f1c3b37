//! Accuracy, error depth, Fleiss' kappa and the evaluation report.
//!
//! Error depth of a seed family is the mean depth over all of its
//! incorrectly predicted variants, defined only when the seed itself is
//! predicted correctly. Families with a mispredicted seed are excluded from
//! every aggregate and counted.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{classify_edits, PerturbationHistogram};
use crate::perturb::EvolutionTree;
use crate::predict::{PredictError, Prediction, PredictionRequest, Predictor};
use crate::text::{Choice, InstanceId, WscInstance};
use crate::wordnet::Lexicon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("EmptyEvaluation: no perturbed instances outside excluded families")]
    EmptyEvaluation,
    #[error("DegenerateAgreement: all ratings fall in one category, so chance agreement is 1")]
    DegenerateAgreement,
    #[error("InvalidRatings: {0}")]
    InvalidRatings(String),
    #[error("UnresolvedLineage: instance {0} is not in the evolution tree")]
    UnresolvedLineage(InstanceId),
    /// Predictions finished before the failure are kept so a rerun can resume.
    #[error("Interrupted after {} predictions: {error}", .checkpoint.len())]
    Interrupted { error: PredictError, checkpoint: BTreeMap<InstanceId, Prediction> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance_id: InstanceId,
    pub seed_id: InstanceId,
    pub depth: u32,
    pub gold: Choice,
    pub predicted: Choice,
    pub correct: bool,
}

impl InstanceResult {
    pub fn new(instance_id: InstanceId, seed_id: InstanceId, depth: u32, gold: Choice, predicted: Choice) -> Self {
        Self { instance_id, seed_id, depth, gold, predicted, correct: gold == predicted }
    }
}

/// Why a family has no error depth, or the value itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ErrorDepth {
    Value(f64),
    /// Every variant was predicted correctly.
    NoErrors,
    /// The seed was mispredicted.
    Excluded,
}

impl ErrorDepth {
    pub fn value(self) -> Option<f64> {
        match self {
            ErrorDepth::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// `perturbed` holds the depth >= 1 results of one family.
pub fn error_depth(seed_correct: bool, perturbed: &[InstanceResult]) -> ErrorDepth {
    if !seed_correct {
        return ErrorDepth::Excluded;
    }
    let wrong: Vec<u32> = perturbed.iter().filter(|r| !r.correct && r.depth >= 1).map(|r| r.depth).collect();
    if wrong.is_empty() {
        ErrorDepth::NoErrors
    } else {
        ErrorDepth::Value(wrong.iter().map(|&d| f64::from(d)).sum::<f64>() / wrong.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFamilyResult {
    pub seed_id: InstanceId,
    pub seed_correct: bool,
    /// Depth >= 1 results, ordered by instance id.
    pub results: Vec<InstanceResult>,
    pub error_depth: ErrorDepth,
}

impl SeedFamilyResult {
    pub fn new(seed_id: InstanceId, seed_correct: bool, mut results: Vec<InstanceResult>) -> Self {
        results.retain(|r| r.depth >= 1);
        results.sort_by_key(|r| r.instance_id);
        let error_depth = error_depth(seed_correct, &results);
        Self { seed_id, seed_correct, results, error_depth }
    }

    pub fn is_excluded(&self) -> bool {
        !self.seed_correct
    }
}

/// Mean of the families' error depths, skipping families without one.
pub fn mean_error_depth(families: &[SeedFamilyResult]) -> Option<f64> {
    let values: Vec<f64> = families.iter().filter_map(|f| f.error_depth.value()).collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Fraction of correct results.
pub fn accuracy(results: &[InstanceResult]) -> Result<f64, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    Ok(results.iter().filter(|r| r.correct).count() as f64 / results.len() as f64)
}

/// Accuracy over the perturbed results of non-excluded families.
pub fn family_accuracy(families: &[SeedFamilyResult]) -> Result<f64, EvalError> {
    let counted: Vec<InstanceResult> =
        families.iter().filter(|f| !f.is_excluded()).flat_map(|f| f.results.iter().cloned()).collect();
    accuracy(&counted)
}

/// Fleiss' kappa over an item-by-category count matrix. Every row must sum
/// to the same number of raters n >= 2.
pub fn fleiss_kappa(ratings: &[Vec<u64>]) -> Result<f64, EvalError> {
    let first = ratings.first().ok_or_else(|| EvalError::InvalidRatings("no items".into()))?;
    let k = first.len();
    if k < 2 {
        return Err(EvalError::InvalidRatings("need at least two categories".into()));
    }
    let n: u64 = first.iter().sum();
    if n < 2 {
        return Err(EvalError::InvalidRatings("need at least two raters per item".into()));
    }
    for (i, row) in ratings.iter().enumerate() {
        if row.len() != k {
            return Err(EvalError::InvalidRatings(format!("item {i} has {} categories, expected {k}", row.len())));
        }
        if row.iter().sum::<u64>() != n {
            return Err(EvalError::InvalidRatings(format!("item {i} has {} ratings, expected {n}", row.iter().sum::<u64>())));
        }
    }
    let items = ratings.len() as f64;
    let n_f = n as f64;
    let p_bar = ratings
        .iter()
        .map(|row| row.iter().map(|&c| (c * c.saturating_sub(1)) as f64).sum::<f64>() / (n_f * (n_f - 1.0)))
        .sum::<f64>()
        / items;
    let p_e: f64 = (0..k)
        .map(|j| {
            let pj = ratings.iter().map(|r| r[j] as f64).sum::<f64>() / (items * n_f);
            pj * pj
        })
        .sum();
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Err(EvalError::DegenerateAgreement);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

pub const EDIT_CONVENTION: &str = "edits are counted against each instance's seed; same-tag substitutions are ~TAG, \
cross-tag substitutions count as one --TAG and one +TAG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_name: String,
    pub dataset_name: String,
    pub accuracy: f64,
    /// Perturbed instances counted in the accuracy.
    pub n_instances: usize,
    pub n_correct: usize,
    pub mean_error_depth: Option<f64>,
    pub excluded_families: usize,
    pub per_family: Vec<SeedFamilyResult>,
    /// Over incorrectly predicted variants of non-excluded families.
    pub histogram: PerturbationHistogram,
    pub edit_convention: String,
}

pub const SUMMARY_HEADER: [&str; 8] =
    ["model", "dataset", "accuracy", "mean_error_depth", "n_instances", "n_correct", "excluded_families", "top_perturbations"];

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One-row CSV; reals to three decimals, absent values as empty cells.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(SUMMARY_HEADER)?;
        w.write_record([
            self.model_name.clone(),
            self.dataset_name.clone(),
            format!("{:.3}", self.accuracy),
            self.mean_error_depth.map(|v| format!("{v:.3}")).unwrap_or_default(),
            self.n_instances.to_string(),
            self.n_correct.to_string(),
            self.excluded_families.to_string(),
            self.histogram.format_top(3),
        ])?;
        w.flush()
    }

    pub fn summary_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_summary_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvaluateOptions {
    pub dataset_name: String,
    /// Predictions already obtained (from an interrupted run); reused as is.
    pub checkpoint: BTreeMap<InstanceId, Prediction>,
}

/// Predicts every instance (plus any seed missing from `dataset`), groups
/// by seed through the tree, and aggregates. Aggregation runs in instance
/// id order, so the report does not depend on completion order.
pub fn evaluate(
    dataset: &[WscInstance],
    tree: &EvolutionTree,
    predictor: &dyn Predictor,
    lexicon: &Lexicon,
    options: &EvaluateOptions,
) -> Result<EvaluationReport, EvalError> {
    let mut targets: BTreeMap<InstanceId, (&WscInstance, InstanceId)> = BTreeMap::new();
    for inst in dataset {
        let node = tree.node(inst.id).ok_or(EvalError::UnresolvedLineage(inst.id))?;
        let seed = tree.root_of(inst.id).map_err(|_| EvalError::UnresolvedLineage(inst.id))?;
        targets.insert(inst.id, (&node.instance, seed));
        let seed_node = tree.node(seed).ok_or(EvalError::UnresolvedLineage(seed))?;
        targets.entry(seed).or_insert((&seed_node.instance, seed));
    }
    if targets.values().all(|(i, _)| i.depth == 0) {
        return Err(EvalError::EmptyEvaluation);
    }

    let outcomes: Vec<(InstanceId, Result<Prediction, PredictError>)> = targets
        .par_iter()
        .map(|(&id, (inst, _))| match options.checkpoint.get(&id) {
            Some(p) => (id, Ok(p.clone())),
            None => (id, predictor.predict(&PredictionRequest::for_instance(inst))),
        })
        .collect();

    let mut predictions = BTreeMap::new();
    let mut failure = None;
    for (id, outcome) in outcomes {
        match outcome {
            Ok(p) => {
                predictions.insert(id, p);
            }
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    if let Some(error) = failure {
        return Err(EvalError::Interrupted { error, checkpoint: predictions });
    }

    let mut by_family: BTreeMap<InstanceId, Vec<InstanceResult>> = BTreeMap::new();
    let mut seed_correct: BTreeMap<InstanceId, bool> = BTreeMap::new();
    for (&id, (inst, seed)) in &targets {
        let result = InstanceResult::new(id, *seed, inst.depth, inst.answer, predictions[&id].choice);
        if id == *seed {
            seed_correct.insert(id, result.correct);
        } else {
            by_family.entry(*seed).or_default().push(result);
        }
    }
    let per_family: Vec<SeedFamilyResult> = seed_correct
        .iter()
        .map(|(&seed, &ok)| SeedFamilyResult::new(seed, ok, by_family.remove(&seed).unwrap_or_default()))
        .collect();

    let counted: Vec<&InstanceResult> = per_family.iter().filter(|f| !f.is_excluded()).flat_map(|f| &f.results).collect();
    if counted.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let n_correct = counted.iter().filter(|r| r.correct).count();

    let mut histogram = PerturbationHistogram::new();
    for r in counted.iter().filter(|r| !r.correct) {
        let seed_tokens = &targets[&r.seed_id].0.tokens;
        histogram.add_all(&classify_edits(lexicon, seed_tokens, &targets[&r.instance_id].0.tokens));
    }

    Ok(EvaluationReport {
        model_name: predictor.name().to_string(),
        dataset_name: options.dataset_name.clone(),
        accuracy: n_correct as f64 / counted.len() as f64,
        n_instances: counted.len(),
        n_correct,
        mean_error_depth: mean_error_depth(&per_family),
        excluded_families: per_family.iter().filter(|f| f.is_excluded()).count(),
        per_family,
        histogram,
        edit_convention: EDIT_CONVENTION.to_string(),
    })
}
