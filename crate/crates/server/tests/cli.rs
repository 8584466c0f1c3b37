mod common;

use std::fs;

use reqwest::blocking::Client;
use serde_json::json;

use common::{core_fixture, evograd, seeded_dir, BinServer, SPRINTED, SPRINTED_ALTHOUGH};

fn p(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(evograd(&["--help"]).status.code(), Some(0));
    assert_eq!(evograd(&["frobnicate"]).status.code(), Some(2));
    let corpus = core_fixture("corpus.csv");
    let wn = core_fixture("wordnet");
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("a.csv");
    let zero = evograd(&["augment", "--in", p(&corpus), "--out", p(&target), "--wordnet", p(&wn), "--factor", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    assert!(!target.exists());

    let missing = evograd(&["evaluate", "--in", "/nonexistent.csv", "--report", p(&out.path().join("r.json"))]);
    assert_eq!(missing.status.code(), Some(1));
    let stderr = String::from_utf8(missing.stderr).unwrap();
    assert!(stderr.starts_with("error: ") && stderr.lines().count() == 1, "{stderr}");

    let bad_op = evograd(&["evolve", "--in", p(&corpus), "--out", p(&target), "--parent", "1", "--op", "sub", "--index", "1"]);
    assert_eq!(bad_op.status.code(), Some(2));
    let blank = evograd(&["evolve", "--in", p(&corpus), "--out", p(&target), "--parent", "1", "--op", "del", "--index", "14"]);
    assert_eq!(blank.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&blank.stderr).contains("BlankEdit"), "{}", String::from_utf8_lossy(&blank.stderr));
}

#[test]
fn evolve_appends_a_child() {
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("e.csv");
    let corpus = core_fixture("corpus.csv");
    let r = evograd(&["evolve", "--in", p(&corpus), "--out", p(&target), "--parent", "1", "--op", "sub", "--index", "3", "--token", "sprinted"]);
    assert_eq!(r.status.code(), Some(0));
    let r = evograd(&["evolve", "--in", p(&target), "--parent", "12", "--op", "sub", "--index", "13", "--token", "although", "--answer", "2"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&target).unwrap();
    let tail: Vec<&str> = text.lines().rev().take(2).collect();
    assert_eq!(tail[1], format!("12,\"{SPRINTED}\",Sue,Sally,1,1"));
    assert_eq!(tail[0], format!("13,\"{SPRINTED_ALTHOUGH}\",Sue,Sally,2,2"));
}

#[test]
fn evaluate_writes_report_and_summary() {
    let out = tempfile::tempdir().unwrap();
    let report = out.path().join("r.json");
    let summary = out.path().join("s.csv");
    let replay = format!("replay:{}", p(&core_fixture("monica_family_predictions.csv")));
    let r = evograd(&[
        "evaluate", "--in", p(&core_fixture("monica_family.csv")), "--predictor", &replay, "--report", p(&report), "--summary", p(&summary),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let s = fs::read_to_string(&summary).unwrap();
    assert!(s.lines().nth(1).unwrap().starts_with("replay,monica_family,0.400,5.333,5,2,0,"), "{s}");
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["accuracy"], 0.4);
}

#[test]
fn augment_is_reproducible_and_analyze_reads_it() {
    let out = tempfile::tempdir().unwrap();
    let corpus = core_fixture("corpus.csv");
    let wn = core_fixture("wordnet");
    let a = out.path().join("a.csv");
    let b = out.path().join("b.csv");
    for t in [&a, &b] {
        let r = evograd(&["augment", "--in", p(&corpus), "--out", p(t), "--wordnet", p(&wn), "--seed", "9", "--factor", "2"]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let seeds = fs::read_to_string(&corpus).unwrap();
    assert!(fs::read_to_string(&a).unwrap().starts_with(&seeds));

    let json = out.path().join("an.json");
    let r = evograd(&["analyze", "--in", p(&a), "--wordnet", p(&wn), "--out", p(&json)]);
    assert_eq!(r.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert!(!v["instances"].as_array().unwrap().is_empty());
    assert_eq!(v["top3"].as_str().unwrap(), String::from_utf8(r.stdout).unwrap().trim());
}

#[test]
fn import_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let corpus = core_fixture("corpus.csv");
    assert_eq!(evograd(&["import", "--in", p(&corpus), "--data-dir", p(&data)]).status.code(), Some(0));
    assert_eq!(evograd(&["import", "--in", p(&corpus), "--data-dir", p(&data)]).status.code(), Some(1));
    let exported = evograd(&["export", "--data-dir", p(&data)]);
    assert_eq!(exported.stdout, fs::read(&corpus).unwrap());

    let again = dir.path().join("again");
    let file = dir.path().join("x.csv");
    fs::write(&file, &exported.stdout).unwrap();
    evograd(&["import", "--in", p(&file), "--data-dir", p(&again)]);
    assert_eq!(evograd(&["export", "--data-dir", p(&again)]).stdout, exported.stdout);
}

#[test]
fn acknowledged_submissions_survive_a_kill() {
    let dir = seeded_dir();
    let c = Client::new();
    let server = BinServer::start(dir.path(), "tok");
    let body = json!({ "parent_id": 1, "sentence": SPRINTED, "option1": "Sue", "option2": "Sally", "answer": 1 });
    let r = c.post(format!("{}/api/submissions", server.base)).json(&body).send().unwrap();
    assert_eq!(r.status(), 201);
    let r = c.post(format!("{}/api/submissions/1/status", server.base)).bearer_auth("tok").json(&json!({"status": "accepted"})).send().unwrap();
    assert_eq!(r.status(), 200);
    let before = c.get(format!("{}/api/dataset.csv", server.base)).send().unwrap().bytes().unwrap();
    server.kill();

    let server = BinServer::start(dir.path(), "tok");
    let after = c.get(format!("{}/api/dataset.csv", server.base)).send().unwrap().bytes().unwrap();
    assert_eq!(before, after);
    let subs: serde_json::Value = c.get(format!("{}/api/submissions", server.base)).send().unwrap().json().unwrap();
    assert_eq!(subs[0]["status"], "accepted");
    let exported = evograd(&["export", "--data-dir", p(dir.path())]);
    assert_eq!(exported.stdout, after.as_ref());
}
