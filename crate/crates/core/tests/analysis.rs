use evograd::analysis::{classify_edits, tag_pos, Direction, EditOp, PerturbationHistogram, PosTag};
use evograd::perturb::token_edit_distance;
use evograd::text::tokenize;
use evograd::wordnet::{load_lexicon, Lexicon};
use proptest::prelude::*;
use std::sync::OnceLock;

fn lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| load_lexicon(format!("{}/tests/fixtures/wordnet", env!("CARGO_MANIFEST_DIR"))).unwrap())
}

fn tags(lex: &Lexicon, s: &str) -> Vec<PosTag> {
    tag_pos(lex, &tokenize(s).unwrap())
}

fn labels(ops: &[EditOp]) -> Vec<String> {
    ops.iter().map(EditOp::label).collect()
}

#[test]
fn closed_class_and_lexicon_tags() {
    let lex = lexicon();
    let mini = load_lexicon(format!("{}/tests/fixtures/wordnet-mini", env!("CARGO_MANIFEST_DIR"))).unwrap();
    assert_eq!(tags(&mini, "bishop"), [PosTag::NN]);
    assert_eq!(tags(lex, "Kevin yelled at Jim because _ was so upset."), [
        PosTag::OTHER,
        PosTag::VB,
        PosTag::IN,
        PosTag::OTHER,
        PosTag::IN,
        PosTag::OTHER,
        PosTag::VB,
        PosTag::RB,
        PosTag::JJ,
        PosTag::PUNCT,
    ]);
    assert_eq!(tags(lex, ", because the"), [PosTag::PUNCT, PosTag::IN, PosTag::DT]);
    assert_eq!(tags(&Lexicon::default(), "quickly zorbs"), [PosTag::RB, PosTag::OTHER]);
}

#[test]
fn same_tag_substitution() {
    let lex = lexicon();
    let a = tokenize("Kevin yelled at Jim because _ was so upset.").unwrap();
    let b = tokenize("Kevin yelled at Jim because _ was so annoying.").unwrap();
    let ops = classify_edits(lex, &a, &b);
    assert_eq!(labels(&ops), ["~JJ"]);
    assert_eq!(ops[0].original_token.as_deref(), Some("upset"));
    assert_eq!(ops[0].new_token.as_deref(), Some("annoying"));
    assert!(classify_edits(lex, &a, &a).is_empty());
}

#[test]
fn deleting_about_is_a_preposition_removal() {
    let lex = lexicon();
    let a = tokenize("Although they ran at about the same speed, Sue beat Sally because _ had such a good start.").unwrap();
    let b = tokenize("Although they ran at the same speed, Sue beat Sally because _ had such a good start.").unwrap();
    let ops = classify_edits(lex, &a, &b);
    assert_eq!(labels(&ops), ["--IN"]);
    assert_eq!(ops[0].direction, Direction::Removed);
    assert_eq!(ops[0].original_token.as_deref(), Some("about"));
    assert_eq!(ops[0].new_token, None);
}

#[test]
fn cross_tag_substitution_splits_in_two() {
    let lex = lexicon();
    let a = tokenize("Sue beat Sally because _ had such a good start.").unwrap();
    let b = tokenize("Sue beat Sally because _ had such a good quickly.").unwrap();
    assert_eq!(labels(&classify_edits(lex, &a, &b)), ["--NN", "+RB"]);
}

/// Twenty edit lists, counted by hand:
/// +NN 9, --NN 7, --JJ 5, ~VB 4, +JJ 3, --IN 2, +RB 1.
fn twenty_lists() -> Vec<Vec<EditOp>> {
    use Direction::*;
    use PosTag::*;
    let op = |d, t| EditOp { direction: d, tag: t, original_token: None, new_token: None };
    let spec: [&[(Direction, PosTag)]; 20] = [
        &[(Added, NN)],
        &[(Added, NN), (Removed, NN)],
        &[(Removed, JJ)],
        &[(Substituted, VB)],
        &[(Added, NN), (Added, JJ)],
        &[(Removed, NN), (Removed, JJ)],
        &[(Added, NN)],
        &[(Removed, IN), (Added, RB)],
        &[(Substituted, VB), (Removed, NN)],
        &[(Added, NN), (Removed, JJ)],
        &[],
        &[(Removed, NN)],
        &[(Added, JJ), (Added, NN)],
        &[(Substituted, VB)],
        &[(Removed, NN), (Removed, IN)],
        &[(Added, NN), (Removed, JJ)],
        &[(Removed, NN)],
        &[(Added, NN), (Substituted, VB)],
        &[(Added, JJ), (Removed, JJ)],
        &[(Added, NN), (Removed, NN)],
    ];
    spec.iter().map(|l| l.iter().map(|&(d, t)| op(d, t)).collect()).collect()
}

#[test]
fn twenty_list_fixture_histogram() {
    let lists = twenty_lists();
    let h = PerturbationHistogram::from_edit_lists(lists.iter().map(Vec::as_slice));
    let expected = [("+NN", 9), ("--NN", 7), ("--JJ", 5), ("~VB", 4), ("+JJ", 3), ("--IN", 2), ("+RB", 1)];
    for (label, count) in expected {
        assert_eq!(h.count(label), count, "{label}");
    }
    assert_eq!(h.counts().len(), expected.len());
    assert_eq!(h.total(), lists.iter().map(Vec::len).sum::<usize>() as u64);
    assert_eq!(h.format_top(3), "+NN (9), --NN (7), --JJ (5)");
}

proptest! {
    #[test]
    fn edit_count_bounds_distance(
        a in prop::collection::vec(prop::sample::select(vec!["the", "man", "ran", "quickly", "good", "because", "_", ",", "bottle"]), 0..8),
        b in prop::collection::vec(prop::sample::select(vec!["the", "man", "ran", "quickly", "good", "because", "_", ",", "bottle"]), 0..8),
    ) {
        let lex = lexicon();
        let sa = tokenize(&a.join(" ")).unwrap_or_default();
        let sb = tokenize(&b.join(" ")).unwrap_or_default();
        let ops = classify_edits(lex, &sa, &sb);
        let d = token_edit_distance(&sa, &sb);
        prop_assert!(ops.len() >= d);
        prop_assert_eq!(tag_pos(lex, &sa).len(), sa.len());
        prop_assert!(classify_edits(lex, &sa, &sa).is_empty());
    }
}
