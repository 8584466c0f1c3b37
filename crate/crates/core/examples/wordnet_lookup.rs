//! Look up synonyms in a WordNet database directory.
//!
//! cargo run --example wordnet_lookup -- [WORDNET_DIR] [WORD...]

use evograd::wordnet::{inflect_like, load_lexicon, PosCategory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/wordnet").to_string());
    let words: Vec<String> = args.collect();
    let words = if words.is_empty() { vec!["yelled".into(), "upset".into(), "poured".into()] } else { words };

    let lex = load_lexicon(&dir)?;
    println!("{} synsets, version {}", lex.synset_count(), lex.version());
    for word in &words {
        for pos in PosCategory::ALL {
            for base in lex.base_forms(&word.to_lowercase(), pos) {
                // Only verbs carry tense over to the synonym.
                let inflect = pos == PosCategory::Verb && base != *word;
                let syns: Vec<String> =
                    lex.synonyms(&base, pos).iter().map(|s| if inflect { inflect_like(s, word) } else { s.clone() }).collect();
                if !syns.is_empty() {
                    println!("{word} ({pos:?}, base {base}): {}", syns.join(", "));
                }
            }
        }
    }
    Ok(())
}
