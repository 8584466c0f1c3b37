use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::text::Choice;

use super::{PredictError, Prediction, PredictionRecord, PredictionRequest, Predictor};

pub const RECORD_HEADER: [&str; 6] = ["sentence", "option1", "option2", "choice", "score1", "score2"];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    sentence: String,
    option1: String,
    option2: String,
    choice: u8,
    score1: f64,
    score2: f64,
}

/// Answers from recorded predictions by exact (normalized) key.
#[derive(Debug, Clone)]
pub struct ReplayPredictor {
    name: String,
    records: HashMap<String, Prediction>,
}

impl ReplayPredictor {
    pub const NAME: &'static str = "replay";

    pub fn new(name: impl Into<String>, records: Vec<PredictionRecord>) -> Result<Self, PredictError> {
        let name = name.into();
        let mut map = HashMap::with_capacity(records.len());
        for r in records {
            let key = r.request.key();
            let prediction = Prediction { model_name: name.clone(), latency_ms: 0, ..r.prediction };
            if map.insert(key, prediction).is_some() {
                return Err(PredictError::DuplicateKey(r.request.sentence));
            }
        }
        Ok(Self { name, records: map })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl Predictor for ReplayPredictor {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        req.validate()?;
        self.records.get(&req.key()).cloned().ok_or_else(|| PredictError::ReplayMiss(req.sentence.clone()))
    }
}

/// Parses prediction records. Rows whose choice disagrees with the argmax
/// of their scores are rejected.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<PredictionRecord>, PredictError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| PredictError::MalformedRow { row: 0, reason: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != RECORD_HEADER {
        return Err(PredictError::MalformedRow {
            row: 0,
            reason: format!("expected header {:?}", RECORD_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let line = i + 1;
        let row = row.map_err(|e| PredictError::MalformedRow { row: line, reason: e.to_string() })?;
        let choice = Choice::from_number(row.choice)
            .ok_or_else(|| PredictError::MalformedRow { row: line, reason: format!("choice {} is not 1 or 2", row.choice) })?;
        let prediction = Prediction::from_scores([row.score1, row.score2], ReplayPredictor::NAME, 0);
        if prediction.choice != choice {
            return Err(PredictError::MalformedRow { row: line, reason: "choice is not the argmax of the scores".into() });
        }
        out.push(PredictionRecord { request: PredictionRequest::new(row.sentence, row.option1, row.option2), prediction });
    }
    Ok(out)
}

pub fn write_records<W: Write>(writer: W, records: &[PredictionRecord]) -> Result<(), PredictError> {
    let io = |e: csv::Error| PredictError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(RECORD_HEADER).map_err(io)?;
    for r in records {
        w.serialize(Row {
            sentence: r.request.sentence.clone(),
            option1: r.request.option1.clone(),
            option2: r.request.option2.clone(),
            choice: r.prediction.choice.number(),
            score1: r.prediction.scores[0],
            score2: r.prediction.scores[1],
        })
        .map_err(io)?;
    }
    w.flush().map_err(|e| PredictError::Io(e.to_string()))
}

/// Loads a replay predictor from a prediction-record CSV file.
pub fn load_records(path: impl AsRef<Path>) -> Result<ReplayPredictor, PredictError> {
    let file = File::open(path.as_ref()).map_err(|e| PredictError::Io(format!("{}: {e}", path.as_ref().display())))?;
    ReplayPredictor::new(ReplayPredictor::NAME, read_records(file)?)
}
