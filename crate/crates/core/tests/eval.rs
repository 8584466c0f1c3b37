use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use evograd::eval::{accuracy, evaluate, fleiss_kappa, ErrorDepth, EvalError, EvaluateOptions, InstanceResult};
use evograd::perturb::{EvolutionTree, PerturbationRecord};
use evograd::predict::{load_records, PredictError, Prediction, PredictionRequest, Predictor, StubPredictor};
use evograd::store::{read_csv_file, tree_from_instances};
use evograd::text::{Choice, InstanceId, Token, WscInstance};
use evograd::wordnet::Lexicon;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn monica_family_report() {
    let started = Instant::now();
    let rows = read_csv_file(fixture("monica_family.csv")).unwrap();
    let tree = tree_from_instances(&rows).unwrap();
    let replay = load_records(fixture("monica_family_predictions.csv")).unwrap();
    let opts = EvaluateOptions { dataset_name: "monica".into(), ..Default::default() };
    let report = evaluate(&rows, &tree, &replay, &Lexicon::default(), &opts).unwrap();
    assert_eq!(report.accuracy, 0.4);
    assert_eq!((report.n_instances, report.n_correct), (5, 2));
    assert!((report.mean_error_depth.unwrap() - 5.333).abs() < 1e-3);
    assert_eq!(report.excluded_families, 0);
    let summary = report.summary_csv();
    assert!(summary.contains(",0.400,5.333,"), "{summary}");
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn empty_dataset_is_an_error() {
    let tree = EvolutionTree::new();
    let err = evaluate(&[], &tree, &StubPredictor, &Lexicon::default(), &EvaluateOptions::default()).unwrap_err();
    assert_eq!(err, EvalError::EmptyEvaluation);
}

/// Five seeds, each grown to ten variants by substituting words one at a
/// time; depths run 1..=5 twice per family.
fn synthetic_tree() -> (EvolutionTree, Vec<WscInstance>) {
    let mut tree = EvolutionTree::new();
    let names = [("Ann", "Bob"), ("Cid", "Dee"), ("Eve", "Fay"), ("Gus", "Hal"), ("Ivy", "Jon")];
    for (i, (a, b)) in names.iter().enumerate() {
        let sentence = format!("{a} told {b} that the small old red car near home was why _ left early today.");
        let seed = WscInstance::seed(InstanceId(tree.peek_next_id().0), &sentence, a, b, Choice::Two).unwrap();
        let root = tree.add_root(seed).unwrap();
        for branch in 0..2 {
            let mut parent = root;
            for step in 0..5 {
                let word = format!("w{i}{branch}{step}");
                let node = tree.apply_perturbation(parent, PerturbationRecord::substitute(5 + step, Token::word(word).unwrap())).unwrap();
                parent = node.id();
            }
        }
    }
    let instances = tree.instances().cloned().collect();
    (tree, instances)
}

/// Wrong exactly on the instances whose depth is in `wrong_depths`.
struct DepthOracle {
    tree: EvolutionTree,
    wrong_depths: BTreeSet<u32>,
}

impl Predictor for DepthOracle {
    fn name(&self) -> &str {
        "oracle"
    }
    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        let inst = self.tree.instances().find(|i| i.sentence() == req.sentence).unwrap();
        let choice = if self.wrong_depths.contains(&inst.depth) { inst.answer.other() } else { inst.answer };
        Ok(Prediction::from_choice(choice, "oracle", 0))
    }
}

#[test]
fn stub_reports_are_deterministic() {
    let (tree, instances) = synthetic_tree();
    assert_eq!(instances.len(), 55);
    let run = || evaluate(&instances, &tree, &StubPredictor, &Lexicon::default(), &EvaluateOptions::default()).unwrap();
    let a = run();
    assert_eq!(a.to_json(), run().to_json());
    assert_eq!(a.summary_csv(), run().summary_csv());
}

#[test]
fn wrong_only_at_depth_k_gives_k() {
    let (tree, instances) = synthetic_tree();
    for k in 1..=5 {
        let oracle = DepthOracle { tree: tree.clone(), wrong_depths: BTreeSet::from([k]) };
        let report = evaluate(&instances, &tree, &oracle, &Lexicon::default(), &EvaluateOptions::default()).unwrap();
        assert_eq!(report.mean_error_depth, Some(f64::from(k)));
        for f in &report.per_family {
            assert_eq!(f.error_depth, ErrorDepth::Value(f64::from(k)));
        }
        assert_eq!(report.accuracy, 0.8);
    }
    let all_right = DepthOracle { tree: tree.clone(), wrong_depths: BTreeSet::new() };
    let report = evaluate(&instances, &tree, &all_right, &Lexicon::default(), &EvaluateOptions::default()).unwrap();
    assert_eq!(report.mean_error_depth, None);
    assert!(report.per_family.iter().all(|f| f.error_depth == ErrorDepth::NoErrors));
    assert!(report.summary_csv().contains(",1.000,,"));
}

#[test]
fn seed_mispredicted_family_is_excluded() {
    let (tree, instances) = synthetic_tree();
    let seed0 = instances[0].id;
    // Wrong on the seeds and at depth 3: every family is excluded.
    let oracle = DepthOracle { tree: tree.clone(), wrong_depths: BTreeSet::from([0, 3]) };
    let err = evaluate(&instances, &tree, &oracle, &Lexicon::default(), &EvaluateOptions::default()).unwrap_err();
    assert_eq!(err, EvalError::EmptyEvaluation);

    // Only the first family's seed is mispredicted.
    struct FirstSeedWrong(DepthOracle, String);
    impl Predictor for FirstSeedWrong {
        fn name(&self) -> &str {
            "first"
        }
        fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
            let p = self.0.predict(req)?;
            Ok(if req.sentence == self.1 { Prediction::from_choice(p.choice.other(), "first", 0) } else { p })
        }
    }
    let base = DepthOracle { tree: tree.clone(), wrong_depths: BTreeSet::from([2]) };
    let p = FirstSeedWrong(base, tree.node(seed0).unwrap().instance.sentence());
    let report = evaluate(&instances, &tree, &p, &Lexicon::default(), &EvaluateOptions::default()).unwrap();
    assert_eq!(report.excluded_families, 1);
    assert_eq!(report.per_family[0].error_depth, ErrorDepth::Excluded);
    assert!(report.per_family[1..].iter().all(|f| f.error_depth == ErrorDepth::Value(2.0)));
    assert_eq!(report.n_instances, 40);
}

struct Flaky {
    calls: AtomicUsize,
    fail_after: usize,
}

impl Predictor for Flaky {
    fn name(&self) -> &str {
        "stub"
    }
    fn predict(&self, req: &PredictionRequest) -> Result<Prediction, PredictError> {
        if self.calls.fetch_add(1, Ordering::SeqCst) >= self.fail_after {
            return Err(PredictError::RemoteUnavailable { retries: 2, reason: "down".into() });
        }
        StubPredictor.predict(req)
    }
}

#[test]
fn interrupted_runs_resume_from_checkpoint() {
    let (tree, instances) = synthetic_tree();
    let flaky = Flaky { calls: AtomicUsize::new(0), fail_after: 20 };
    let err = evaluate(&instances, &tree, &flaky, &Lexicon::default(), &EvaluateOptions::default()).unwrap_err();
    let EvalError::Interrupted { error, checkpoint } = err else { panic!("expected interruption") };
    assert!(matches!(error, PredictError::RemoteUnavailable { .. }));
    assert_eq!(checkpoint.len(), 20);

    let opts = EvaluateOptions { checkpoint, ..Default::default() };
    let healthy = Flaky { calls: AtomicUsize::new(0), fail_after: usize::MAX };
    let resumed = evaluate(&instances, &tree, &healthy, &Lexicon::default(), &opts).unwrap();
    assert_eq!(healthy.calls.load(Ordering::SeqCst), 35);
    let fresh = evaluate(&instances, &tree, &StubPredictor, &Lexicon::default(), &EvaluateOptions::default()).unwrap();
    assert_eq!(resumed, fresh);
}

#[test]
fn two_hundred_two_row_accuracy() {
    // Rows 0, 3, 6, ..., 201 are wrong: 68 of 202.
    let results: Vec<InstanceResult> = (0..202u64)
        .map(|i| {
            let predicted = if i % 3 == 0 { Choice::Two } else { Choice::One };
            InstanceResult::new(InstanceId(i), InstanceId(0), 1, Choice::One, predicted)
        })
        .collect();
    assert_eq!(accuracy(&results).unwrap(), 134.0 / 202.0);
}

#[test]
fn kappa_fixtures() {
    assert_eq!(fleiss_kappa(&[vec![3, 0], vec![0, 3], vec![3, 0]]).unwrap(), 1.0);
    let k = fleiss_kappa(&[vec![3, 0], vec![0, 3], vec![2, 1], vec![1, 2]]).unwrap();
    assert!((k - 1.0 / 3.0).abs() < 1e-9, "{k}");
    let k = fleiss_kappa(&[vec![1, 1], vec![1, 1], vec![1, 1], vec![1, 1]]).unwrap();
    assert!(k < 0.0);
    assert!((k + 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn kappa_ignores_category_order(
        rows in prop::collection::vec(prop::collection::vec(0u64..5, 3), 2..12),
        perm in Just([2usize, 0, 1]),
    ) {
        // Pad each row so all sum to the same n.
        let n = rows.iter().map(|r| r.iter().sum::<u64>()).max().unwrap().max(2);
        let rows: Vec<Vec<u64>> = rows.into_iter().map(|mut r| { let s: u64 = r.iter().sum(); r[0] += n - s; r }).collect();
        let permuted: Vec<Vec<u64>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
        match (fleiss_kappa(&rows), fleiss_kappa(&permuted)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
