//! Grow a small evolution tree from one seed and print each node's depth
//! and lineage.

use evograd::perturb::{EvolutionTree, PerturbationRecord};
use evograd::text::{tokenize, Choice, InstanceId, Token, WscInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = WscInstance::seed(InstanceId(0), "Kevin yelled at Jim because _ was so upset.", "Kevin", "Jim", Choice::One)?;
    for (i, t) in tokenize(&seed.sentence())?.iter().enumerate() {
        print!("{}:{} ", i + 1, t.surface());
    }
    println!();

    let (mut tree, root) = EvolutionTree::with_root(seed)?;
    let screamed = tree.apply_perturbation(root, PerturbationRecord::substitute(2, Token::word("screamed")?))?;
    let although = tree.apply_perturbation(screamed.id(), PerturbationRecord::substitute(5, Token::word("although")?))?;
    let very = tree.apply_perturbation(root, PerturbationRecord::insert(9, Token::word("very")?))?;
    // Touching an already perturbed position does not deepen the node.
    let shouted = tree.apply_perturbation(although.id(), PerturbationRecord::substitute(2, Token::word("shouted")?))?;

    for node in [&screamed, &although, &very, &shouted] {
        let path: Vec<String> = tree.lineage(node.id())?.iter().map(|n| n.id().0.to_string()).collect();
        println!("depth {}  [{}]  {}", node.depth(), path.join(" -> "), node.instance.sentence());
    }
    Ok(())
}
