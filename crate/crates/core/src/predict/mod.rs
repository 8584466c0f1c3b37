//! Predictors answer a Winograd request with a choice and a score per
//! option. Every [`Prediction`] satisfies `choice == argmax(scores)`, ties
//! going to option 1.

mod prompt;
mod remote;
mod replay;
mod stub;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{detokenize, tokenize, validate_fields, Choice, TokenSequence, Violation, WscInstance};

pub use prompt::{build_fewshot_prompt, FEWSHOT_HEADER, FEWSHOT_TEMPLATE_VERSION};
pub use remote::{RemoteConfig, RemotePredictor, MODEL_ENDPOINT_ENV};
pub use replay::{load_records, read_records, write_records, ReplayPredictor, RECORD_HEADER};
pub use stub::StubPredictor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("RemoteUnavailable: {reason} (after {retries} retries)")]
    RemoteUnavailable { retries: u32, reason: String },
    #[error("ReplayMiss: no record for {0:?}")]
    ReplayMiss(String),
    #[error("MalformedResponse: {0}")]
    MalformedResponse(String),
    #[error("DuplicateKey: {0:?} appears more than once")]
    DuplicateKey(String),
    #[error("MalformedRow: row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("KTooLarge: asked for {k} demonstrations from a pool of {available}")]
    KTooLarge { k: usize, available: usize },
    #[error("InvalidRequest: {}", join_violations(.0))]
    InvalidRequest(Vec<Violation>),
    #[error("Io: {0}")]
    Io(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredictionRequest {
    /// Sentence containing exactly one `_`.
    pub sentence: String,
    pub option1: String,
    pub option2: String,
}

impl PredictionRequest {
    pub fn new(sentence: impl Into<String>, option1: impl Into<String>, option2: impl Into<String>) -> Self {
        Self { sentence: sentence.into(), option1: option1.into(), option2: option2.into() }
    }

    pub fn for_instance(inst: &WscInstance) -> Self {
        Self::new(inst.sentence(), inst.option1.clone(), inst.option2.clone())
    }

    /// Tokenizes the sentence and checks blank and options, reporting every
    /// violation.
    pub fn validate(&self) -> Result<TokenSequence, PredictError> {
        let tokens = tokenize(&self.sentence).unwrap_or_default();
        let violations = validate_fields(&tokens, &self.option1, &self.option2);
        if violations.is_empty() {
            Ok(tokens)
        } else {
            Err(PredictError::InvalidRequest(violations))
        }
    }

    /// Lookup key with whitespace normalized through the tokenizer.
    pub fn key(&self) -> String {
        let sentence = tokenize(&self.sentence).map(|t| detokenize(&t)).unwrap_or_else(|_| self.sentence.trim().to_string());
        format!("{}\u{1f}{}\u{1f}{}", sentence, self.option1.trim(), self.option2.trim())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub choice: Choice,
    pub scores: [f64; 2],
    #[serde(rename = "model")]
    pub model_name: String,
    pub latency_ms: u64,
}

impl Prediction {
    /// Builds a prediction whose choice is the argmax of `scores`.
    pub fn from_scores(scores: [f64; 2], model_name: impl Into<String>, latency_ms: u64) -> Self {
        Self { choice: argmax(scores), scores, model_name: model_name.into(), latency_ms }
    }

    /// For backends that only return a label.
    pub fn from_choice(choice: Choice, model_name: impl Into<String>, latency_ms: u64) -> Self {
        let scores = match choice {
            Choice::One => [1.0, 0.0],
            Choice::Two => [0.0, 1.0],
        };
        Self::from_scores(scores, model_name, latency_ms)
    }

    pub fn is_consistent(&self) -> bool {
        self.choice == argmax(self.scores)
    }
}

/// Option 2 only when strictly better.
pub fn argmax(scores: [f64; 2]) -> Choice {
    if scores[1] > scores[0] {
        Choice::Two
    } else {
        Choice::One
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub request: PredictionRequest,
    pub prediction: Prediction,
}

pub trait Predictor: Send + Sync {
    fn name(&self) -> &str;
    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError>;
}

impl<P: Predictor + ?Sized> Predictor for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        (**self).predict(req)
    }
}

impl<P: Predictor + ?Sized> Predictor for std::sync::Arc<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        (**self).predict(req)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_to_one() {
        assert_eq!(argmax([0.5, 0.5]), Choice::One);
        assert_eq!(argmax([0.1, 0.5]), Choice::Two);
        assert_eq!(argmax([0.9, 0.5]), Choice::One);
        assert_eq!(Prediction::from_choice(Choice::Two, "m", 0).scores, [0.0, 1.0]);
    }

    #[test]
    fn request_validation_lists_everything() {
        let err = PredictionRequest::new("no blank here", "a", "a").validate().unwrap_err();
        assert_eq!(err, PredictError::InvalidRequest(vec![Violation::MissingBlank, Violation::DuplicateOptions]));
        assert!(PredictionRequest::new("_ won.", "Sue", "Sally").validate().is_ok());
    }

    #[test]
    fn key_normalizes_spacing() {
        let a = PredictionRequest::new("Sue  beat Sally because _ won .", "Sue", "Sally");
        let b = PredictionRequest::new("Sue beat Sally because _ won.", "Sue ", "Sally");
        assert_eq!(a.key(), b.key());
    }
}
