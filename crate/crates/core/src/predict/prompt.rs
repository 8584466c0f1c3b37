use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::text::WscInstance;

use super::PredictError;

/// Bumped whenever the wording or line layout below changes.
pub const FEWSHOT_TEMPLATE_VERSION: &str = "evograd-fewshot/1";

pub const FEWSHOT_HEADER: &str = "Each sentence contains a blank (_) that refers to one of two options. \
Reply with the number of the option that correctly fills the blank.";

fn line(inst: &WscInstance) -> String {
    format!("Sentence: {} Options: 1) {} 2) {} Answer:", inst.sentence(), inst.option1, inst.option2)
}

/// Instruction header, `k` demonstrations sampled without replacement from
/// `train` (seeded), then the query with its answer left open. One line each.
pub fn build_fewshot_prompt(train: &[WscInstance], k: usize, seed: u64, query: &WscInstance) -> Result<String, PredictError> {
    if k > train.len() {
        return Err(PredictError::KTooLarge { k, available: train.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from(FEWSHOT_HEADER);
    out.push('\n');
    for i in sample(&mut rng, train.len(), k) {
        let demo = &train[i];
        out.push_str(&line(demo));
        out.push_str(&format!(" {}\n", demo.answer.number()));
    }
    out.push_str(&line(query));
    Ok(out)
}
