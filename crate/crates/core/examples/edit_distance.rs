//! Token edit distance and the alignment behind it.

use evograd::perturb::{align, token_edit_distance};
use evograd::text::tokenize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = tokenize("Although they ran at about the same speed, Sue beat Sally because _ had such a good start.")?;
    let variants = [
        "Although they sprinted at about the same speed, Sue beat Sally because _ had such a good start.",
        "Although they sprinted at about the same speed, Sue beat Sally although _ had such a good start.",
        "They ran at the same speed, but Sue beat Sally because _ had a good start.",
    ];
    for v in variants {
        let other = tokenize(v)?;
        println!("{}  {v}", token_edit_distance(&seed, &other));
        for step in align(&seed, &other).iter().filter(|s| s.is_edit()) {
            println!("    {step:?}");
        }
    }
    Ok(())
}
