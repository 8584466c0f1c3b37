//! Shared helpers for integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evograd::perturb::{ChildFields, EvolutionTree, PerturbationRecord};
use evograd::store::read_csv_file;
use evograd::text::{Choice, InstanceId, Token, WscInstance};

/// Core fixtures, also when this module is compiled into another crate's tests.
pub fn fixture(name: &str) -> String {
    let own = format!("{}/tests/fixtures", env!("CARGO_MANIFEST_DIR"));
    let dir = if std::path::Path::new(&own).join("corpus.csv").exists() {
        own
    } else {
        format!("{}/../core/tests/fixtures", env!("CARGO_MANIFEST_DIR"))
    };
    format!("{dir}/{name}")
}

const VOCAB: &[&str] = &[
    "quickly", "bright", "garden", "heavy", "window", "o'clock", "well-known", "river", "calm", "stone", "Dr", "ten",
    "\u{e9}t\u{e9}", "twenty-one", "don't", "rather", "under", "the", "an", "yesterday",
];

/// `n` instances grown from the fixture corpus seeds plus two seeds with
/// awkward options (embedded commas and quotes). Families are laid out seed
/// first; ids are positional.
pub fn generate_corpus(n: usize, seed: u64) -> Vec<WscInstance> {
    let mut seeds = read_csv_file(fixture("corpus.csv")).unwrap();
    seeds.push(
        WscInstance::seed(InstanceId(0), "Smith, John met \"Big\" Al downtown, and _ paid for lunch.", "Smith, John", "\"Big\" Al", Choice::Two)
            .unwrap(),
    );
    seeds.push(WscInstance::seed(InstanceId(0), "The lawyer asked the witness a question, but _ was reluctant to repeat it.", "lawyer", "witness", Choice::Two).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = EvolutionTree::new();
    let mut families: Vec<Vec<InstanceId>> = Vec::new();
    for (i, s) in seeds.into_iter().enumerate() {
        let inst = WscInstance { id: InstanceId(i as u64), ..s };
        families.push(vec![tree.add_root(inst).unwrap()]);
    }
    let mut total = families.len();
    while total < n {
        let f = rng.gen_range(0..families.len());
        let parent = *families[f].choose(&mut rng).unwrap();
        let len = tree.node(parent).unwrap().instance.tokens.len();
        let w = Token::word(*VOCAB.choose(&mut rng).unwrap()).unwrap();
        let record = match rng.gen_range(0..10) {
            0..=5 => PerturbationRecord::substitute(rng.gen_range(1..=len), w),
            6..=7 => PerturbationRecord::insert(rng.gen_range(1..=len + 1), w),
            8 => PerturbationRecord::insert(rng.gen_range(2..=len), Token::punctuation(',').unwrap()),
            _ => PerturbationRecord::remove(rng.gen_range(1..=len)),
        };
        let parent_answer = tree.node(parent).unwrap().instance.answer;
        let answer = if rng.gen_bool(0.3) { parent_answer.other() } else { parent_answer };
        let fields = ChildFields { answer: Some(answer), ..ChildFields::default() };
        if let Ok(node) = tree.apply_with(parent, vec![record], fields) {
            families[f].push(node.id());
            total += 1;
        }
    }
    let ordered: Vec<WscInstance> = families
        .iter()
        .flat_map(|f| f.iter().map(|id| tree.node(*id).unwrap().instance.clone()))
        .collect();
    ordered.into_iter().enumerate().map(|(i, inst)| WscInstance { id: InstanceId(i as u64), ..inst }).collect()
}
