//! Part-of-speech classification of the edits separating a perturbed
//! sentence from its seed, and histograms of edit types over incorrect
//! predictions.
//!
//! Substitutions whose two sides share a tag are reported as `~TAG`;
//! substitutions that change the tag count as a removal plus an addition.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perturb::{align, AlignStep};
use crate::text::{Token, TokenKind, TokenSequence};
use crate::wordnet::{Lexicon, PosCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosTag {
    NN,
    VB,
    JJ,
    RB,
    IN,
    DT,
    PRP,
    CC,
    MD,
    CD,
    PUNCT,
    OTHER,
}

impl PosTag {
    pub fn label(self) -> &'static str {
        match self {
            PosTag::NN => "NN",
            PosTag::VB => "VB",
            PosTag::JJ => "JJ",
            PosTag::RB => "RB",
            PosTag::IN => "IN",
            PosTag::DT => "DT",
            PosTag::PRP => "PRP",
            PosTag::CC => "CC",
            PosTag::MD => "MD",
            PosTag::CD => "CD",
            PosTag::PUNCT => "PUNCT",
            PosTag::OTHER => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

const PREPOSITIONS: &[&str] = &[
    "about", "above", "across", "after", "against", "along", "although", "amid", "among", "around", "as", "at",
    "because", "before", "behind", "below", "beneath", "beside", "besides", "between", "beyond", "by", "despite",
    "down", "during", "except", "for", "from", "if", "in", "inside", "into", "like", "near", "of", "off", "on",
    "onto", "out", "outside", "over", "past", "since", "than", "though", "through", "throughout", "till", "to",
    "toward", "towards", "under", "underneath", "unless", "until", "unlike", "up", "upon", "via", "whereas",
    "while", "with", "within", "without", "whether", "once",
];

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "each", "every", "either", "neither", "some", "any", "no",
    "all", "both", "another", "such", "what", "which", "whatever", "whichever",
];

const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "he", "him", "his",
    "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours", "ourselves",
    "they", "them", "their", "theirs", "themselves", "who", "whom", "whose", "one", "someone", "somebody",
    "anyone", "anybody", "everyone", "everybody", "nobody", "something", "anything", "everything", "nothing",
];

/// Forms of be/have/do, which WordNet lists only under their lemmas.
const AUXILIARIES: &[&str] = &[
    "is", "was", "were", "are", "am", "be", "been", "being", "has", "have", "had", "having", "do", "does", "did",
];

const COORDINATORS: &[&str] = &["and", "but", "or", "nor", "yet", "so", "plus"];

const MODALS: &[&str] = &["can", "could", "may", "might", "must", "shall", "should", "will", "would", "ought"];

const NUMERALS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "twenty", "thirty", "hundred", "thousand", "million", "billion",
];

/// Words after which an adjective reading wins (copulas and degree words).
const ADJECTIVE_CONTEXT: &[&str] = &[
    "so", "very", "too", "quite", "rather", "more", "most", "less", "least", "is", "was", "were", "are", "am", "be",
    "been", "being", "became", "become", "becomes", "seem", "seems", "seemed", "felt", "feel", "feels", "looked",
    "look", "looks", "got", "get", "gets", "remained",
];

/// Tags that can introduce an attributive adjective ("a good start").
const ATTRIBUTIVE_LEAD: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "such", "his", "her", "its", "their", "our", "my", "your",
    "some", "any", "no", "every", "each",
];

fn closed_class(lower: &str) -> Option<PosTag> {
    // "that"/"so"/"one" are ambiguous; order decides.
    if MODALS.contains(&lower) {
        Some(PosTag::MD)
    } else if PRONOUNS.contains(&lower) && lower != "one" {
        Some(PosTag::PRP)
    } else if DETERMINERS.contains(&lower) {
        Some(PosTag::DT)
    } else if PREPOSITIONS.contains(&lower) {
        Some(PosTag::IN)
    } else if COORDINATORS.contains(&lower) {
        Some(PosTag::CC)
    } else if NUMERALS.contains(&lower) || (!lower.is_empty() && lower.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')) {
        Some(PosTag::CD)
    } else {
        None
    }
}

fn wordnet_tag(pos: PosCategory) -> PosTag {
    match pos {
        PosCategory::Noun => PosTag::NN,
        PosCategory::Verb => PosTag::VB,
        PosCategory::Adjective => PosTag::JJ,
        PosCategory::Adverb => PosTag::RB,
    }
}

/// Rule-based tagger: closed-class lists, then WordNet categories with a
/// small amount of left/right context for adjectives, then the augmenter's
/// preference order (inflected verb > noun > adjective > adverb > verb),
/// then an -ly adverb fallback.
pub fn tag_pos(lex: &Lexicon, seq: &TokenSequence) -> Vec<PosTag> {
    let tokens = seq.tokens();
    let lowers: Vec<String> = tokens.iter().map(|t| t.surface().to_lowercase()).collect();
    (0..tokens.len()).map(|i| tag_at(lex, tokens, &lowers, i)).collect()
}

fn tag_at(lex: &Lexicon, tokens: &[Token], lowers: &[String], i: usize) -> PosTag {
    let token = &tokens[i];
    match token.kind() {
        TokenKind::Punctuation => return PosTag::PUNCT,
        TokenKind::Blank => return PosTag::OTHER,
        TokenKind::Word => {}
    }
    let lower = lowers[i].as_str();
    if AUXILIARIES.contains(&lower) {
        return PosTag::VB;
    }
    // Degree "so" ("so upset") versus the conjunction.
    if lower == "so" {
        let modifies = tokens.get(i + 1).filter(|t| t.is_word()).is_some_and(|t| {
            let cats = lex.lookup_pos(t.surface());
            cats.contains(&PosCategory::Adjective) || cats.contains(&PosCategory::Adverb)
        });
        if modifies {
            return PosTag::RB;
        }
    }
    if let Some(tag) = closed_class(lower) {
        return tag;
    }
    let cats = lex.lookup_pos(lower);
    if cats.is_empty() {
        if lower.len() > 3 && lower.ends_with("ly") {
            return PosTag::RB;
        }
        return PosTag::OTHER;
    }
    if cats.len() == 1 {
        return wordnet_tag(*cats.iter().next().expect("non-empty"));
    }
    let prev = i.checked_sub(1).map(|p| lowers[p].as_str());
    if cats.contains(&PosCategory::Adjective) {
        if prev.is_some_and(|p| ADJECTIVE_CONTEXT.contains(&p)) {
            return PosTag::JJ;
        }
        let next_is_noun = tokens
            .get(i + 1)
            .filter(|t| t.is_word())
            .is_some_and(|t| lex.lookup_pos(t.surface()).contains(&PosCategory::Noun));
        if prev.is_some_and(|p| ATTRIBUTIVE_LEAD.contains(&p)) && next_is_noun {
            return PosTag::JJ;
        }
    }
    if cats.contains(&PosCategory::Verb) && lex.is_inflected_verb(lower) {
        return PosTag::VB;
    }
    for pos in [PosCategory::Noun, PosCategory::Adjective, PosCategory::Adverb, PosCategory::Verb] {
        if cats.contains(&pos) {
            return wordnet_tag(pos);
        }
    }
    PosTag::OTHER
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Added,
    Removed,
    Substituted,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Added => "+",
            Direction::Removed => "--",
            Direction::Substituted => "~",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub direction: Direction,
    pub tag: PosTag,
    pub original_token: Option<String>,
    pub new_token: Option<String>,
}

impl EditOp {
    /// "+NN", "--JJ", "~VB".
    pub fn label(&self) -> String {
        format!("{}{}", self.direction.symbol(), self.tag)
    }
}

/// Classifies the minimal alignment between two sentences by part of
/// speech. Insertions become `+TAG`, deletions `--TAG`.
pub fn classify_edits(lex: &Lexicon, original: &TokenSequence, perturbed: &TokenSequence) -> Vec<EditOp> {
    let tags_a = tag_pos(lex, original);
    let tags_b = tag_pos(lex, perturbed);
    let surf_a = |i: usize| original.tokens()[i - 1].surface().to_string();
    let surf_b = |j: usize| perturbed.tokens()[j - 1].surface().to_string();
    let added = |j: usize| EditOp { direction: Direction::Added, tag: tags_b[j - 1], original_token: None, new_token: Some(surf_b(j)) };
    let removed = |i: usize| EditOp { direction: Direction::Removed, tag: tags_a[i - 1], original_token: Some(surf_a(i)), new_token: None };

    let mut ops = Vec::new();
    for step in align(original, perturbed) {
        match step {
            AlignStep::Keep { .. } => {}
            AlignStep::Insert { b, .. } => ops.push(added(b)),
            AlignStep::Delete { a } => ops.push(removed(a)),
            AlignStep::Substitute { a, b } => {
                if tags_a[a - 1] == tags_b[b - 1] {
                    ops.push(EditOp {
                        direction: Direction::Substituted,
                        tag: tags_a[a - 1],
                        original_token: Some(surf_a(a)),
                        new_token: Some(surf_b(b)),
                    });
                } else {
                    ops.push(removed(a));
                    ops.push(added(b));
                }
            }
        }
    }
    ops
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationHistogram {
    counts: BTreeMap<String, u64>,
}

impl PerturbationHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edit_lists<'a, I>(lists: I) -> Self
    where
        I: IntoIterator<Item = &'a [EditOp]>,
    {
        let mut h = Self::new();
        for list in lists {
            h.add_all(list);
        }
        h
    }

    pub fn add(&mut self, op: &EditOp) {
        *self.counts.entry(op.label()).or_default() += 1;
    }

    pub fn add_all(&mut self, ops: &[EditOp]) {
        for op in ops {
            self.add(op);
        }
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// The `k` most frequent labels; ties break by label in byte order.
    pub fn top_k(&self, k: usize) -> Vec<(String, u64)> {
        let mut all: Vec<(String, u64)> = self.counts.iter().map(|(l, c)| (l.clone(), *c)).collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    /// "+NN (150), --NN (148), --JJ (105)".
    pub fn format_top(&self, k: usize) -> String {
        self.top_k(k).iter().map(|(l, c)| format!("{l} ({c})")).collect::<Vec<_>>().join(", ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(direction: Direction, tag: PosTag) -> EditOp {
        EditOp { direction, tag, original_token: None, new_token: None }
    }

    #[test]
    fn closed_classes() {
        assert_eq!(closed_class("because"), Some(PosTag::IN));
        assert_eq!(closed_class("about"), Some(PosTag::IN));
        assert_eq!(closed_class("the"), Some(PosTag::DT));
        assert_eq!(closed_class("she"), Some(PosTag::PRP));
        assert_eq!(closed_class("would"), Some(PosTag::MD));
        assert_eq!(closed_class("and"), Some(PosTag::CC));
        assert_eq!(closed_class("14"), Some(PosTag::CD));
        assert_eq!(closed_class("bottle"), None);
    }

    #[test]
    fn histogram_counts_and_top() {
        let ops = vec![op(Direction::Added, PosTag::NN), op(Direction::Added, PosTag::NN), op(Direction::Removed, PosTag::JJ)];
        let h = PerturbationHistogram::from_edit_lists([ops.as_slice()]);
        assert_eq!(h.count("+NN"), 2);
        assert_eq!(h.count("--JJ"), 1);
        assert_eq!(h.total(), 3);
        assert_eq!(h.top_k(1), vec![("+NN".to_string(), 2)]);
        assert!(PerturbationHistogram::from_edit_lists(std::iter::empty::<&[EditOp]>()).is_empty());
    }

    #[test]
    fn ties_break_by_label() {
        let ops = vec![op(Direction::Removed, PosTag::NN), op(Direction::Added, PosTag::NN), op(Direction::Substituted, PosTag::JJ)];
        let h = PerturbationHistogram::from_edit_lists([ops.as_slice()]);
        assert_eq!(h.format_top(3), "+NN (1), --NN (1), ~JJ (1)");
    }
}
