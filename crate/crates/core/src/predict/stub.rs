use crate::text::TokenSequence;

use super::{PredictError, Prediction, PredictionRequest, Predictor};

/// Dependency-free proximity heuristic: picks the option mentioned closest
/// to the blank. Each option scores minus its token distance; an option not
/// found in the sentence scores `-(len + 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubPredictor;

impl StubPredictor {
    pub const NAME: &'static str = "stub";

    pub fn new() -> Self {
        Self
    }
}

/// Token distance from the blank to the nearest occurrence of `option`
/// (matched as a token subsequence).
fn distance_to_blank(tokens: &TokenSequence, blank: usize, option: &str) -> Option<usize> {
    let needle: Vec<&str> = option.split_whitespace().collect();
    let hay = tokens.surfaces();
    if needle.is_empty() || needle.len() > hay.len() {
        return None;
    }
    (0..=hay.len() - needle.len())
        .filter(|&s| hay[s..s + needle.len()] == needle[..])
        .map(|s| {
            let start = s + 1;
            let end = s + needle.len();
            if end < blank {
                blank - end
            } else {
                start - blank
            }
        })
        .min()
}

impl Predictor for StubPredictor {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        let tokens = req.validate()?;
        let blank = tokens.blank_positions()[0];
        let missing = -((tokens.len() + 1) as f64);
        let score = |o: &str| distance_to_blank(&tokens, blank, o).map_or(missing, |d| -(d as f64));
        Ok(Prediction::from_scores([score(&req.option1), score(&req.option2)], Self::NAME, 0))
    }
}
