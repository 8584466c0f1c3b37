//! Evaluate a replayed model on a family with one seed and five perturbed
//! variants, then print the JSON report and the summary CSV.

use evograd::eval::{evaluate, EvaluateOptions};
use evograd::predict::load_records;
use evograd::store::{read_csv_file, tree_from_instances};
use evograd::wordnet::load_lexicon;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let rows = read_csv_file(format!("{fixtures}/monica_family.csv"))?;
    let tree = tree_from_instances(&rows)?;
    let replay = load_records(format!("{fixtures}/monica_family_predictions.csv"))?;
    let lex = load_lexicon(format!("{fixtures}/wordnet"))?;

    let options = EvaluateOptions { dataset_name: "monica".into(), ..Default::default() };
    let report = evaluate(&rows, &tree, &replay, &lex, &options)?;
    println!("{}", report.to_json());
    print!("{}", report.summary_csv());
    Ok(())
}
