//! The perturbation function (substitute / insert / remove) with depth and
//! lineage bookkeeping.
//!
//! Depth is tracked over stable token markers rather than raw indices, so an
//! insertion or removal that shifts later tokens cannot confuse which
//! original positions have been touched. Re-editing a touched position
//! leaves the depth unchanged.

mod align;
mod tree;

use thiserror::Error;

pub use align::{align, token_edit_distance, AlignStep};
pub use tree::{
    records_from_alignment, replay_lineage, replay_records, ChildFields, EvolutionNode, EvolutionTree, Marker,
    PerturbationKind, PerturbationRecord, TreeView,
};

use crate::text::{InstanceId, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PerturbError {
    #[error("BadIndex: index {index} is out of range for a sentence of {len} tokens")]
    BadIndex { index: usize, len: usize },
    #[error("BlankEdit: token {index} is the blank and cannot be perturbed")]
    BlankEdit { index: usize },
    #[error("UnknownParent: no node with id {0}")]
    UnknownParent(InstanceId),
    #[error("UnknownNode: no node with id {0}")]
    UnknownNode(InstanceId),
    #[error("DuplicateId: node {0} already exists")]
    DuplicateId(InstanceId),
    #[error("MalformedRecord: {0}")]
    MalformedRecord(String),
    #[error("InvalidChild: {0:?}")]
    InvalidChild(Vec<Violation>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, Choice, Token, WscInstance};

    fn word(s: &str) -> Token {
        Token::word(s).unwrap()
    }

    fn kevin() -> (EvolutionTree, InstanceId) {
        let seed = WscInstance::seed(
            InstanceId(0),
            "Kevin yelled at Jim because _ was so upset.",
            "Kevin",
            "Jim",
            Choice::One,
        )
        .unwrap();
        EvolutionTree::with_root(seed).unwrap()
    }

    const SUE: &str = "Although they ran at about the same speed, Sue beat Sally because _ had such a good start.";

    #[test]
    fn substitution_chain_tracks_depth() {
        let (mut tree, root) = kevin();
        let s1 = tree.apply_perturbation(root, PerturbationRecord::substitute(2, word("screamed"))).unwrap();
        assert_eq!(s1.instance.sentence(), "Kevin screamed at Jim because _ was so upset.");
        assert_eq!(s1.depth(), 1);
        assert_eq!(s1.perturbed_roots.iter().copied().collect::<Vec<_>>(), vec![Marker::Root(2)]);

        let s2 = tree.apply_perturbation(s1.id(), PerturbationRecord::substitute(5, word("although"))).unwrap();
        assert_eq!(s2.instance.sentence(), "Kevin screamed at Jim although _ was so upset.");
        assert_eq!(s2.depth(), 2);
        assert_eq!(s2.perturbed_roots.iter().copied().collect::<Vec<_>>(), vec![Marker::Root(2), Marker::Root(5)]);

        let s3 = tree.apply_perturbation(s2.id(), PerturbationRecord::substitute(2, word("shouted"))).unwrap();
        assert_eq!(s3.instance.sentence(), "Kevin shouted at Jim although _ was so upset.");
        assert_eq!(s3.depth(), 2);
        assert_eq!(tree.evolution_depth(s3.id()).unwrap(), 2);
        assert_eq!(tree.evolution_depth(root).unwrap(), 0);
    }

    #[test]
    fn remove_about_from_sue_sally() {
        let seed = WscInstance::seed(InstanceId(7), SUE, "Sue", "Sally", Choice::One).unwrap();
        let (mut tree, root) = EvolutionTree::with_root(seed.clone()).unwrap();
        let child = tree.apply_perturbation(root, PerturbationRecord::remove(5)).unwrap();
        assert_eq!(
            child.instance.sentence(),
            "Although they ran at the same speed, Sue beat Sally because _ had such a good start."
        );
        assert_eq!(child.depth(), 1);
        assert_eq!(token_edit_distance(&seed.tokens, &child.instance.tokens), 1);
    }

    #[test]
    fn insert_then_remove_keeps_both_markers() {
        let (mut tree, root) = kevin();
        let ins = tree.apply_perturbation(root, PerturbationRecord::insert(9, word("very"))).unwrap();
        assert_eq!(ins.instance.sentence(), "Kevin yelled at Jim because _ was so very upset.");
        assert_eq!(ins.depth(), 1);
        let del = tree.apply_perturbation(ins.id(), PerturbationRecord::remove(9)).unwrap();
        assert_eq!(del.instance.sentence(), "Kevin yelled at Jim because _ was so upset.");
        assert_eq!(del.depth(), 1);
        // Removing an original token after the shift still names its root position.
        let del2 = tree.apply_perturbation(ins.id(), PerturbationRecord::remove(10)).unwrap();
        assert!(del2.perturbed_roots.contains(&Marker::Root(9)));
        assert_eq!(del2.depth(), 2);
    }

    #[test]
    fn insert_at_end_is_allowed() {
        let (mut tree, root) = kevin();
        let n = tree.node(root).unwrap().instance.tokens.len();
        let child = tree.apply_perturbation(root, PerturbationRecord::insert(n + 1, word("Indeed"))).unwrap();
        assert_eq!(child.instance.tokens.len(), n + 1);
        assert!(matches!(
            tree.apply_perturbation(root, PerturbationRecord::insert(n + 2, word("x"))),
            Err(PerturbError::BadIndex { .. })
        ));
    }

    #[test]
    fn errors_are_reported() {
        let (mut tree, root) = kevin();
        assert_eq!(
            tree.apply_perturbation(root, PerturbationRecord::substitute(0, word("x"))).unwrap_err(),
            PerturbError::BadIndex { index: 0, len: 10 }
        );
        assert_eq!(
            tree.apply_perturbation(root, PerturbationRecord::substitute(11, word("x"))).unwrap_err(),
            PerturbError::BadIndex { index: 11, len: 10 }
        );
        assert_eq!(
            tree.apply_perturbation(root, PerturbationRecord::substitute(6, word("she"))).unwrap_err(),
            PerturbError::BlankEdit { index: 6 }
        );
        assert_eq!(
            tree.apply_perturbation(root, PerturbationRecord::remove(6)).unwrap_err(),
            PerturbError::BlankEdit { index: 6 }
        );
        assert_eq!(
            tree.apply_perturbation(InstanceId(99), PerturbationRecord::remove(1)).unwrap_err(),
            PerturbError::UnknownParent(InstanceId(99))
        );
        assert_eq!(tree.evolution_depth(InstanceId(99)).unwrap_err(), PerturbError::UnknownNode(InstanceId(99)));
        assert!(matches!(
            tree.apply_perturbation(root, PerturbationRecord::substitute_phrase(2, vec![])),
            Err(PerturbError::MalformedRecord(_))
        ));
        // Failed applications register nothing.
        assert_eq!(tree.len(), 1);
    }

    #[test]
    fn option_edits_do_not_count() {
        let (mut tree, root) = kevin();
        let child = tree
            .apply_with(
                root,
                vec![PerturbationRecord::substitute(4, word("Melissa"))],
                ChildFields { option2: Some("Melissa".into()), ..Default::default() },
            )
            .unwrap();
        assert_eq!(child.instance.option2, "Melissa");
        assert_eq!(child.depth(), 1);
        let dup = tree.apply_with(root, vec![], ChildFields { option2: Some("Kevin".into()), ..Default::default() });
        assert!(matches!(dup, Err(PerturbError::InvalidChild(_))));
    }

    #[test]
    fn lineage_replays_to_sentence() {
        let (mut tree, root) = kevin();
        let s1 = tree.apply_perturbation(root, PerturbationRecord::substitute(2, word("screamed"))).unwrap();
        let s2 = tree.apply_perturbation(s1.id(), PerturbationRecord::substitute(5, word("although"))).unwrap();
        let path = tree.lineage(s2.id()).unwrap();
        let ids: Vec<_> = path.iter().map(|n| n.id()).collect();
        assert_eq!(ids, vec![root, s1.id(), s2.id()]);
        assert_eq!(path[1].records, vec![PerturbationRecord::substitute(2, word("screamed"))]);
        assert_eq!(path[2].records, vec![PerturbationRecord::substitute(5, word("although"))]);
        assert_eq!(replay_lineage(&path).unwrap(), s2.instance.sentence());
        assert_eq!(tree.lineage(root).unwrap().len(), 1);
        assert_eq!(tree.root_of(s2.id()).unwrap(), root);
        assert_eq!(tree.lineage(InstanceId(42)).unwrap_err(), PerturbError::UnknownNode(InstanceId(42)));
    }

    #[test]
    fn derived_child_depth_from_alignment() {
        let seed = WscInstance::seed(InstanceId(0), SUE, "Sue", "Sally", Choice::One).unwrap();
        let (mut tree, root) = EvolutionTree::with_root(seed).unwrap();
        let one = tokenize("Although they sprinted at about the same speed, Sue beat Sally because _ had such a good start.")
            .unwrap();
        let two =
            tokenize("Although they sprinted at about the same speed, Sue beat Sally although _ had such a good start.")
                .unwrap();
        let preview = tree.preview_child(root, &one, ChildFields::default()).unwrap();
        assert_eq!(preview.depth(), 1);
        assert_eq!(tree.len(), 1);
        let n1 = tree.derive_child(root, &one, ChildFields::default(), None).unwrap();
        assert_eq!(n1.depth(), 1);
        let n2 = tree
            .derive_child(root, &two, ChildFields { answer: Some(Choice::Two), ..Default::default() }, None)
            .unwrap();
        assert_eq!(n2.depth(), 2);
        assert_eq!(n2.instance.answer, Choice::Two);
        // Going through the depth-1 node reaches the same depth.
        let n3 = tree.derive_child(n1.id(), &two, ChildFields::default(), None).unwrap();
        assert_eq!(n3.depth(), 2);
        assert_eq!(replay_lineage(&tree.lineage(n3.id()).unwrap()).unwrap(), n3.instance.sentence());
    }

    #[test]
    fn adopted_rows_carry_recorded_depth() {
        let seed = WscInstance::seed(InstanceId(0), SUE, "Sue", "Sally", Choice::One).unwrap();
        let (mut tree, root) = EvolutionTree::with_root(seed.clone()).unwrap();
        let mut row = seed;
        row.id = InstanceId(1);
        row.depth = 5;
        row.parent_id = Some(root);
        row.tokens = tokenize("Even though they raced at the same speed, Sue beat Sally although _ had a powerful start.").unwrap();
        tree.adopt(row.clone()).unwrap();
        assert_eq!(tree.evolution_depth(InstanceId(1)).unwrap(), 5);
        assert_eq!(tree.root_of(InstanceId(1)).unwrap(), root);
        let child = tree.apply_perturbation(InstanceId(1), PerturbationRecord::substitute(2, word("if"))).unwrap();
        assert_eq!(child.depth(), 6);
        assert_eq!(child.id(), InstanceId(2));
        assert_eq!(tree.lineage(child.id()).unwrap().len(), 2);
        assert_eq!(tree.adopt(row).unwrap_err(), PerturbError::DuplicateId(InstanceId(1)));
    }

    #[test]
    fn snapshots_are_copy_on_write() {
        let (mut tree, root) = kevin();
        let view = tree.snapshot();
        tree.apply_perturbation(root, PerturbationRecord::substitute(2, word("screamed"))).unwrap();
        assert_eq!(view.len(), 1);
        assert_eq!(tree.snapshot().len(), 2);
    }

    #[test]
    fn multiword_substitution_is_one_event() {
        let seed = WscInstance::seed(
            InstanceId(0),
            "I poured water from the bottle into the cup until _ was full.",
            "bottle",
            "cup",
            Choice::Two,
        )
        .unwrap();
        let (mut tree, root) = EvolutionTree::with_root(seed).unwrap();
        let child = tree
            .apply_perturbation(root, PerturbationRecord::substitute_phrase(6, vec![word("feeding"), word("bottle")]))
            .unwrap();
        assert_eq!(child.instance.sentence(), "I poured water from the feeding bottle into the cup until _ was full.");
        assert_eq!(child.depth(), 1);
        let again = tree.apply_perturbation(child.id(), PerturbationRecord::remove(6)).unwrap();
        assert_eq!(again.depth(), 1);
    }
}
