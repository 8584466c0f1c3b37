//! The stub and replay predictors, and a few-shot prompt.
//! Set EVOGRAD_MODEL_ENDPOINT to also query a remote scoring service.

use evograd::predict::{build_fewshot_prompt, load_records, PredictionRequest, Predictor, RemoteConfig, RemotePredictor, StubPredictor};
use evograd::store::read_csv_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let corpus = read_csv_file(format!("{fixtures}/corpus.csv"))?;

    let req = PredictionRequest::for_instance(&corpus[0]);
    let p = StubPredictor.predict(&req)?;
    println!("stub: choice {} scores {:?}", p.choice.number(), p.scores);

    let replay = load_records(format!("{fixtures}/monica_family_predictions.csv"))?;
    for row in read_csv_file(format!("{fixtures}/monica_family.csv"))? {
        let p = replay.predict(&PredictionRequest::for_instance(&row))?;
        println!("replay: gold {} predicted {}  (depth {})", row.answer.number(), p.choice.number(), row.depth);
    }

    if let Some(cfg) = RemoteConfig::from_env() {
        let remote = RemotePredictor::new("remote", cfg)?;
        match remote.predict(&req) {
            Ok(p) => println!("remote ({}): choice {}", p.model_name, p.choice.number()),
            Err(e) => println!("remote: {e}"),
        }
    }

    let prompt = build_fewshot_prompt(&corpus[1..], 3, 7, &corpus[0])?;
    println!("\n{prompt}");
    Ok(())
}
