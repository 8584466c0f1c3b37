//! Seeded WordNet synonym augmentation over the fixture corpus.

use evograd::augment::{batch_augment, AugmentationConfig};
use evograd::store::{read_csv_file, tree_from_instances};
use evograd::wordnet::load_lexicon;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let seeds = read_csv_file(format!("{fixtures}/corpus.csv"))?;
    let lex = load_lexicon(format!("{fixtures}/wordnet"))?;
    let mut tree = tree_from_instances(&seeds)?;

    let cfg = AugmentationConfig { factor: 2, ..AugmentationConfig::with_seed(42) };
    let (made, summary) = batch_augment(&seeds, &lex, &cfg, &mut tree)?;
    for a in &made {
        println!("{:>3} {:>12} -> {:<12} {}", a.node.id().0, a.original, a.replacement, a.node.instance.sentence());
    }
    println!("{summary:?}");
    println!("config {}", cfg.fingerprint());
    Ok(())
}
