//! WordNet synonym augmentation: each variant replaces one randomly chosen
//! eligible word with a random synonym, matching verb tense, and is
//! registered in the evolution tree as a single perturbation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::perturb::{ChildFields, EvolutionNode, EvolutionTree, PerturbError, PerturbationRecord};
use crate::stopwords::STOPWORDS;
use crate::text::{tokenize, InstanceId, Source, Token, WscInstance};
use crate::wordnet::{inflect_like, Lexicon, PosCategory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AugmentError {
    #[error("NoCandidate: instance {0} has no replaceable word with a synonym")]
    NoCandidate(InstanceId),
    #[error("UnknownInstance: {0} is not in the evolution tree")]
    UnknownInstance(InstanceId),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationConfig {
    pub rng_seed: u64,
    pub max_attempts: usize,
    pub stopwords: BTreeSet<String>,
    /// Variants requested per input instance.
    pub factor: usize,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            max_attempts: 10,
            stopwords: STOPWORDS.iter().map(|s| s.to_string()).collect(),
            factor: 1,
        }
    }
}

impl AugmentationConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self { rng_seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        if self.factor == 0 {
            return Err(AugmentError::InvalidConfig("factor must be at least 1".into()));
        }
        if self.max_attempts == 0 {
            return Err(AugmentError::InvalidConfig("max_attempts must be at least 1".into()));
        }
        if self.stopwords.is_empty() {
            return Err(AugmentError::InvalidConfig("stopword list is empty".into()));
        }
        Ok(())
    }

    /// SHA-256 over every setting that affects output, stopwords included.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("seed={};attempts={};factor={};", self.rng_seed, self.max_attempts, self.factor));
        for w in &self.stopwords {
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One augmentation and the lexical facts behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Augmentation {
    pub node: Arc<EvolutionNode>,
    /// 1-based position of the replaced token in the parent.
    pub index: usize,
    pub original: String,
    pub replacement: String,
    /// Base form of the original the synonym was looked up from.
    pub source_lemma: String,
    pub synonym_lemma: String,
    pub pos: PosCategory,
    pub lexicon_version: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub inputs: usize,
    pub attempted: usize,
    pub produced: usize,
    pub skipped: usize,
}

fn starts_uppercase(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn pluralize(phrase: &str) -> String {
    let (head, last) = match phrase.rsplit_once(' ') {
        Some((h, l)) => (format!("{h} "), l),
        None => (String::new(), phrase),
    };
    let plural = if let Some(stem) = last.strip_suffix('y').filter(|s| !s.ends_with(['a', 'e', 'i', 'o', 'u'])) {
        format!("{stem}ies")
    } else if ["s", "x", "z", "ch", "sh"].iter().any(|s| last.ends_with(s)) {
        format!("{last}es")
    } else {
        format!("{last}s")
    };
    format!("{head}{plural}")
}

/// Tokens that may be replaced: words other than the blank, stopwords,
/// capitalized words past the first position, and words naming an option.
pub fn eligible_positions(inst: &WscInstance, stopwords: &BTreeSet<String>) -> Vec<usize> {
    inst.tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let position = i + 1;
            if !t.is_word() {
                return None;
            }
            let surface = t.surface();
            let lower = surface.to_lowercase();
            if stopwords.contains(&lower) {
                return None;
            }
            if position > 1 && starts_uppercase(surface) {
                return None;
            }
            if surface.eq_ignore_ascii_case(inst.option1.trim()) || surface.eq_ignore_ascii_case(inst.option2.trim()) {
                return None;
            }
            Some(position)
        })
        .collect()
}

/// POS order tried for a token: verb first when it carries verbal
/// inflection, then noun, adjective, adverb, and verb as the last resort.
fn pos_preference(lex: &Lexicon, surface: &str) -> Vec<PosCategory> {
    use PosCategory::*;
    if lex.is_inflected_verb(surface) {
        vec![Verb, Noun, Adjective, Adverb]
    } else {
        vec![Noun, Adjective, Adverb, Verb]
    }
}

struct Choice {
    pos: PosCategory,
    source_lemma: String,
    synonym: String,
    text: String,
}

/// Synonym options for one surface form under its preferred POS, keyed by
/// rendered replacement text so the draw is over distinct outputs.
/// Rendered text -> (base form, synonym lemma).
type SynonymOptions = BTreeMap<String, (String, String)>;

fn synonym_options(lex: &Lexicon, surface: &str) -> Option<(PosCategory, SynonymOptions)> {
    let lower = surface.to_lowercase();
    for pos in pos_preference(lex, surface) {
        let mut options = BTreeMap::new();
        for base in lex.base_forms(&lower, pos) {
            for syn in lex.synonyms(&base, pos) {
                let rendered = render(&syn, surface, &base, pos);
                if rendered.eq_ignore_ascii_case(surface) || rendered.eq_ignore_ascii_case(&base) {
                    continue;
                }
                options.entry(rendered).or_insert_with(|| (base.clone(), syn.clone()));
            }
        }
        if !options.is_empty() {
            return Some((pos, options));
        }
    }
    None
}

fn render(synonym: &str, surface: &str, base: &str, pos: PosCategory) -> String {
    let lower = surface.to_lowercase();
    let phrase = synonym.replace('_', " ");
    let inflected = match pos {
        PosCategory::Verb if lower != base => inflect_like(synonym, &lower),
        PosCategory::Noun if lower != base && lower.ends_with('s') => pluralize(&phrase),
        _ => phrase,
    };
    if starts_uppercase(surface) {
        capitalize(&inflected)
    } else {
        inflected
    }
}

fn replace_word(option: &str, from: &str, to: &str) -> Option<String> {
    let words: Vec<&str> = option.split_whitespace().collect();
    if words.len() < 2 || !words.iter().any(|w| w.eq_ignore_ascii_case(from)) {
        return None;
    }
    Some(
        words
            .iter()
            .map(|w| if w.eq_ignore_ascii_case(from) { to } else { w })
            .collect::<Vec<_>>()
            .join(" "),
    )
}

fn augment_with_rng(
    id: InstanceId,
    lex: &Lexicon,
    cfg: &AugmentationConfig,
    tree: &mut EvolutionTree,
    rng: &mut ChaCha8Rng,
) -> Result<Augmentation, AugmentError> {
    let parent = Arc::clone(tree.node(id).ok_or(AugmentError::UnknownInstance(id))?);
    let inst = &parent.instance;
    let mut positions = eligible_positions(inst, &cfg.stopwords);
    positions.shuffle(rng);

    for &position in positions.iter().take(cfg.max_attempts) {
        let surface = inst.tokens.get(position).map(Token::surface).unwrap_or_default().to_string();
        let Some((pos, options)) = synonym_options(lex, &surface) else {
            continue;
        };
        let keys: Vec<&String> = options.keys().collect();
        let Some(&text) = keys.choose(rng) else {
            continue;
        };
        let (source_lemma, synonym) = options[text].clone();
        let choice = Choice { pos, source_lemma, synonym, text: text.clone() };

        let Ok(tokens) = tokenize(&choice.text) else {
            continue;
        };
        if tokens.iter().any(Token::is_blank) {
            continue;
        }
        let fields = ChildFields {
            option1: replace_word(&inst.option1, &surface, &choice.text),
            option2: replace_word(&inst.option2, &surface, &choice.text),
            answer: None,
            source: Some(Source::Wordnet),
        };
        let record = PerturbationRecord::substitute_phrase(position, tokens.into_tokens());
        match tree.apply_with(id, vec![record], fields) {
            Ok(node) => {
                return Ok(Augmentation {
                    node,
                    index: position,
                    original: surface,
                    replacement: choice.text,
                    source_lemma: choice.source_lemma,
                    synonym_lemma: choice.synonym,
                    pos: choice.pos,
                    lexicon_version: lex.version().to_string(),
                })
            }
            Err(PerturbError::InvalidChild(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(AugmentError::NoCandidate(id))
}

/// Produces one WordNet variant of the tree node `id`, seeded by
/// `cfg.rng_seed`. The child is one depth deeper than its parent.
pub fn wordnet_augment(
    id: InstanceId,
    lex: &Lexicon,
    cfg: &AugmentationConfig,
    tree: &mut EvolutionTree,
) -> Result<Augmentation, AugmentError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    augment_with_rng(id, lex, cfg, tree, &mut rng)
}

/// Seed for one (instance, variant) pair, mixed from the run seed.
pub fn derived_seed(seed: u64, id: InstanceId, variant: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.0.to_le_bytes());
    h.update((variant as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Requests `cfg.factor` variants of every instance (each drawn from the
/// original, with its own derived seed). Instances with no candidate are
/// skipped and counted.
pub fn batch_augment(
    dataset: &[WscInstance],
    lex: &Lexicon,
    cfg: &AugmentationConfig,
    tree: &mut EvolutionTree,
) -> Result<(Vec<Augmentation>, BatchSummary), AugmentError> {
    cfg.validate()?;
    let mut out = Vec::new();
    let mut summary = BatchSummary { inputs: dataset.len(), ..Default::default() };
    for inst in dataset {
        if !tree.contains(inst.id) {
            return Err(AugmentError::UnknownInstance(inst.id));
        }
        for variant in 0..cfg.factor {
            summary.attempted += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(cfg.rng_seed, inst.id, variant));
            match augment_with_rng(inst.id, lex, cfg, tree, &mut rng) {
                Ok(a) => {
                    summary.produced += 1;
                    out.push(a);
                }
                Err(AugmentError::NoCandidate(_)) => summary.skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok((out, summary))
}
