//! A data directory: seed instances, a submission journal and the exported
//! dataset CSV.

use evograd::predict::{PredictionRequest, Predictor, StubPredictor};
use evograd::store::{read_csv_file, DatasetStore, Proposal, SubmissionStatus};
use evograd::text::{Choice, InstanceId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds = read_csv_file(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/corpus.csv"))?;
    let dir = std::env::temp_dir().join(format!("evograd-store-{}", std::process::id()));
    let mut store = DatasetStore::create(&dir, &seeds, None)?;

    let variants = [
        ("Although they sprinted at about the same speed, Sue beat Sally because _ had such a good start.", Choice::One),
        ("Although they sprinted at about the same speed, Sue beat Sally although _ had such a good start.", Choice::Two),
    ];
    for (sentence, answer) in variants {
        let proposal = Proposal {
            parent_id: InstanceId(1),
            sentence: sentence.into(),
            option1: "Sue".into(),
            option2: "Sally".into(),
            answer,
            submitter: "example".into(),
            model: StubPredictor::NAME.into(),
        };
        let prediction = StubPredictor.predict(&PredictionRequest::new(sentence, "Sue", "Sally"))?;
        let sub = store.submit(proposal, prediction)?;
        println!("submission {} depth {} model says {}", sub.id, sub.depth, sub.prediction.choice.number());
    }
    store.set_status(1, SubmissionStatus::Accepted)?;
    store.set_status(2, SubmissionStatus::Rejected)?;

    // Reopening replays the journal.
    let store = DatasetStore::open(&dir)?;
    let csv = String::from_utf8(store.export_csv_bytes())?;
    for line in csv.lines().rev().take(2).collect::<Vec<_>>().into_iter().rev() {
        println!("{line}");
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
