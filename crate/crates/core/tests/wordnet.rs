use std::path::PathBuf;

use evograd::wordnet::{inflect_like, load_lexicon, Lexicon, PosCategory, WORDNET_ENV};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn lexicon() -> Lexicon {
    load_lexicon(fixture("wordnet")).unwrap()
}

#[test]
fn mini_fixture_has_exactly_ten_synsets() {
    let lex = load_lexicon(fixture("wordnet-mini")).unwrap();
    assert_eq!(lex.synset_count(), 10);
    assert_eq!(lex.version(), "3.0");
    let bottle = lex.synset(PosCategory::Noun, 2877266).unwrap();
    assert_eq!(bottle.lemmas, ["bottle", "feeding_bottle", "nursing_bottle"]);
    assert!(lex.synset(PosCategory::Noun, 9857200).unwrap().lemmas.contains(&"bishop".to_string()));
    assert!(lex.synset(PosCategory::Noun, 7120524).unwrap().lemmas.contains(&"yell".to_string()));
    assert!(lex.synset(PosCategory::Verb, 2876657).is_none());
}

#[test]
fn every_index_entry_resolves() {
    for dir in ["wordnet", "wordnet-mini"] {
        let lex = load_lexicon(fixture(dir)).unwrap();
        for (lemma, pos, offsets) in lex.index_entries() {
            for &o in offsets {
                let s = lex.synset(pos, o).unwrap_or_else(|| panic!("{lemma}/{pos}: {o}"));
                assert!(s.lemmas.iter().any(|l| l == lemma), "{lemma} not in synset {o}");
            }
        }
    }
}

#[test]
fn yell_and_scream_are_verb_synonyms() {
    let lex = lexicon();
    let syn = lex.synonyms("yell", PosCategory::Verb);
    assert!(syn.contains("scream"), "{syn:?}");
    assert!(!syn.contains("yell"));
    assert!(lex.synonyms("YELL", PosCategory::Verb).contains("scream"));
    assert!(lex.synonyms("scream", PosCategory::Verb).contains("yell"));
    assert!(lex.synonyms("zzzz", PosCategory::Noun).is_empty());
}

#[test]
fn pour_and_decant_share_a_synset() {
    let lex = lexicon();
    assert!(lex.synonyms("pour", PosCategory::Verb).contains("decant"));
    assert!(lex.synonyms("bottle", PosCategory::Noun).contains("feeding_bottle"));
}

#[test]
fn synonymy_is_symmetric_within_synsets() {
    let lex = lexicon();
    for synset in lex.synsets() {
        for a in &synset.lemmas {
            let syn = lex.synonyms(a, synset.pos);
            assert!(!syn.contains(a));
            for b in synset.lemmas.iter().filter(|b| *b != a) {
                assert!(syn.contains(b), "{a} -> {b}");
                assert!(lex.synonyms(b, synset.pos).contains(a), "{b} -> {a}");
            }
        }
    }
}

#[test]
fn pos_lookup_with_detachment() {
    let lex = lexicon();
    let bottle = lex.lookup_pos("bottle");
    assert_eq!(bottle.into_iter().collect::<Vec<_>>(), vec![PosCategory::Noun, PosCategory::Verb]);
    assert!(lex.lookup_pos("qwxz").is_empty());
    assert!(lex.lookup_pos("running").contains(&PosCategory::Verb));
    assert!(lex.base_forms("running", PosCategory::Verb).contains(&"run".to_string()));
    assert!(lex.base_forms("took", PosCategory::Verb).contains(&"take".to_string()));
    assert!(lex.base_forms("yelled", PosCategory::Verb).contains(&"yell".to_string()));
    assert!(lex.is_inflected_verb("yelled"));
    assert!(!lex.is_inflected_verb("bottle"));
}

#[test]
fn inflects_yelled_to_screamed() {
    assert_eq!(inflect_like("scream", "yelled"), "screamed");
    assert_eq!(inflect_like("take", "grabbed"), "took");
    assert_eq!(inflect_like("run", "run"), "run");
}

/// Runs against a full WordNet 3.0 `dict` directory when one is configured.
#[test]
fn full_wordnet_release_counts() {
    let Ok(dir) = std::env::var(WORDNET_ENV) else {
        eprintln!("skipping: {WORDNET_ENV} not set");
        return;
    };
    let lex = load_lexicon(dir).unwrap();
    assert_eq!(lex.version(), "3.0");
    assert_eq!(lex.synset_count(), 117_659);
    assert!(lex.synonyms("yell", PosCategory::Verb).contains("scream"));
    let bottle = lex.lookup_pos("bottle");
    assert_eq!(bottle.into_iter().collect::<Vec<_>>(), vec![PosCategory::Noun, PosCategory::Verb]);
    assert!(lex.lookup_pos("running").contains(&PosCategory::Verb));
}
