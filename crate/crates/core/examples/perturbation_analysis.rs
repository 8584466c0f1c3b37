//! Part-of-speech classification of edits and the top-k histogram line.

use evograd::analysis::{classify_edits, tag_pos, PerturbationHistogram};
use evograd::text::tokenize;
use evograd::wordnet::load_lexicon;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lex = load_lexicon(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/wordnet"))?;
    let seed = tokenize("Kevin yelled at Jim because _ was so upset.")?;
    let tags: Vec<_> = seed.iter().zip(tag_pos(&lex, &seed)).map(|(t, p)| format!("{}/{}", t.surface(), p.label())).collect();
    println!("{}", tags.join(" "));

    let variants = [
        "Kevin yelled at Jim because _ was so annoying.",
        "Kevin yelled at Jim because _ became so annoying.",
        "Kevin yelled at Jim because _ was upset.",
        "Kevin screamed at Melissa because _ was so upset.",
    ];
    let mut histogram = PerturbationHistogram::new();
    for v in variants {
        let edits = classify_edits(&lex, &seed, &tokenize(v)?);
        println!("{:<20} {v}", edits.iter().map(|e| e.label()).collect::<Vec<_>>().join(" "));
        histogram.add_all(&edits);
    }
    println!("top: {}", histogram.format_top(3));
    Ok(())
}
