//! Run the service in-process against a temporary data directory, walk
//! through a browse, predict, submit, accept and download session, and exit.

use std::sync::Arc;

use evograd::store::{read_csv_file, DatasetStore};
use evograd_server::{router, AppState};
use serde_json::{json, Value};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let seeds = read_csv_file(format!("{FIXTURES}/corpus.csv"))?;
    let store = DatasetStore::create(dir.path(), &seeds, None)?;
    let state = Arc::new(AppState::new(store, vec![], Some("letmein".into())));

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(async move { axum::serve(listener, router(state)).await });
    println!("serving on {base}");

    let c = reqwest::Client::new();
    let list: Value = c.get(format!("{base}/api/sentences?limit=2")).send().await?.json().await?;
    println!("first sentences: {list}");

    let sentence = "Although they sprinted at about the same speed, Sue beat Sally because _ had such a good start.";
    let body = json!({ "sentence": sentence, "option1": "Sue", "option2": "Sally" });
    let p: Value = c.post(format!("{base}/api/predict")).json(&body).send().await?.json().await?;
    println!("prediction: {p}");

    let body = json!({ "parent_id": 1, "sentence": sentence, "option1": "Sue", "option2": "Sally", "answer": 1 });
    let sub: Value = c.post(format!("{base}/api/submissions")).json(&body).send().await?.json().await?;
    println!("submitted: {sub}");

    let id = sub["submission_id"].as_u64().unwrap_or(1);
    let r = c
        .post(format!("{base}/api/submissions/{id}/status"))
        .bearer_auth("letmein")
        .json(&json!({ "status": "accepted" }))
        .send()
        .await?;
    println!("accept: {}", r.status());

    let csv = c.get(format!("{base}/api/dataset.csv")).send().await?.text().await?;
    println!("last row: {}", csv.lines().last().unwrap_or_default());
    Ok(())
}
