//! Reader for the Princeton WordNet 3.x plain-text database
//! (`index.<pos>` / `data.<pos>`, plus optional `<pos>.exc` exception
//! lists) and the synonym / part-of-speech queries built on it.

mod morph;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use morph::{has_verbal_morphology, inflect_like};

/// Environment variable naming the WordNet `dict` directory.
pub const WORDNET_ENV: &str = "EVOGRAD_WORDNET";

#[derive(Debug, Error)]
pub enum WordnetError {
    #[error("MissingFile: {0}")]
    MissingFile(PathBuf),
    #[error("MalformedLine: {file}:{line}: {reason}")]
    MalformedLine { file: String, line: usize, reason: String },
    #[error("DanglingOffset: {file}:{line}: synset {offset:08} is not present in the data file")]
    DanglingOffset { file: String, line: usize, offset: u64 },
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosCategory {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl PosCategory {
    pub const ALL: [PosCategory; 4] = [PosCategory::Noun, PosCategory::Verb, PosCategory::Adjective, PosCategory::Adverb];

    /// Suffix of the database files for this category.
    pub fn file_suffix(self) -> &'static str {
        match self {
            PosCategory::Noun => "noun",
            PosCategory::Verb => "verb",
            PosCategory::Adjective => "adj",
            PosCategory::Adverb => "adv",
        }
    }

    fn from_code(code: &str) -> Option<Self> {
        match code {
            "n" => Some(PosCategory::Noun),
            "v" => Some(PosCategory::Verb),
            "a" | "s" => Some(PosCategory::Adjective),
            "r" => Some(PosCategory::Adverb),
            _ => None,
        }
    }
}

impl fmt::Display for PosCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_suffix())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub offset: u64,
    pub pos: PosCategory,
    /// Lowercase, underscores for multiword lemmas, unique.
    pub lemmas: Vec<String>,
    pub gloss: String,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    version: String,
    synsets: HashMap<(PosCategory, u64), Synset>,
    index: HashMap<(String, PosCategory), Vec<u64>>,
    exceptions: HashMap<(String, PosCategory), Vec<String>>,
}

fn normalize(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}

fn malformed(file: &str, line: usize, reason: impl Into<String>) -> WordnetError {
    WordnetError::MalformedLine { file: file.to_string(), line, reason: reason.into() }
}

fn is_header(line: &str) -> bool {
    line.starts_with("  ")
}

/// Strips the syntactic markers WordNet appends to adjective lemmas.
fn strip_adj_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(w) = word.strip_suffix(marker) {
            return w;
        }
    }
    word
}

fn parse_data_line(file: &str, line_no: usize, line: &str) -> Result<Synset, WordnetError> {
    let (fields, gloss) = match line.split_once(" | ") {
        Some((f, g)) => (f, g.trim_end().to_string()),
        None => (line.trim_end().trim_end_matches('|'), String::new()),
    };
    let mut it = fields.split_ascii_whitespace();
    let mut next = |what: &str| it.next().ok_or_else(|| malformed(file, line_no, format!("missing {what}")));

    let offset: u64 = next("offset")?.parse().map_err(|_| malformed(file, line_no, "bad offset"))?;
    next("lex_filenum")?;
    let ss_type = next("ss_type")?;
    let pos = PosCategory::from_code(ss_type).ok_or_else(|| malformed(file, line_no, format!("bad ss_type {ss_type}")))?;
    let w_cnt_raw = next("w_cnt")?;
    let w_cnt = usize::from_str_radix(w_cnt_raw, 16).map_err(|_| malformed(file, line_no, "bad w_cnt"))?;
    if w_cnt == 0 {
        return Err(malformed(file, line_no, "synset without words"));
    }
    let mut lemmas: Vec<String> = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = strip_adj_marker(next("word")?).to_lowercase();
        next("lex_id")?;
        if !lemmas.contains(&word) {
            lemmas.push(word);
        }
    }
    let p_cnt: usize = next("p_cnt")?.parse().map_err(|_| malformed(file, line_no, "bad p_cnt"))?;
    for _ in 0..p_cnt {
        for what in ["pointer_symbol", "pointer_offset", "pointer_pos", "source/target"] {
            next(what)?;
        }
    }
    // Verb frames (and anything else before the gloss) are not needed.
    Ok(Synset { offset, pos, lemmas, gloss })
}

#[derive(Debug)]
struct IndexLine {
    lemma: String,
    pos: PosCategory,
    offsets: Vec<u64>,
}

fn parse_index_line(file: &str, line_no: usize, line: &str) -> Result<IndexLine, WordnetError> {
    let fields: Vec<&str> = line.split_ascii_whitespace().collect();
    let bad = |reason: &str| malformed(file, line_no, reason);
    if fields.len() < 6 {
        return Err(bad("too few fields"));
    }
    let lemma = fields[0].to_lowercase();
    let pos = PosCategory::from_code(fields[1]).ok_or_else(|| bad("bad pos"))?;
    let synset_cnt: usize = fields[2].parse().map_err(|_| bad("bad synset_cnt"))?;
    let p_cnt: usize = fields[3].parse().map_err(|_| bad("bad p_cnt"))?;
    // lemma pos synset_cnt p_cnt [ptr]*p_cnt sense_cnt tagsense_cnt [offset]*synset_cnt
    let start = 4 + p_cnt + 2;
    if fields.len() != start + synset_cnt {
        return Err(bad("field count does not match synset_cnt"));
    }
    let offsets = fields[start..]
        .iter()
        .map(|f| f.parse::<u64>().map_err(|_| bad("bad synset offset")))
        .collect::<Result<_, _>>()?;
    Ok(IndexLine { lemma, pos, offsets })
}

fn read_required(path: &Path) -> Result<String, WordnetError> {
    if !path.is_file() {
        return Err(WordnetError::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

/// Version string from the license header ("WordNet 3.0 Copyright ...").
fn detect_version(header_text: &str) -> Option<String> {
    header_text.lines().take_while(|l| is_header(l)).find_map(|l| {
        let pos = l.find("WordNet ")?;
        let rest = &l[pos + "WordNet ".len()..];
        let ver: String = rest.chars().take_while(|c| c.is_ascii_digit() || *c == '.').collect();
        (!ver.is_empty()).then_some(ver)
    })
}

/// Loads all four parts of speech from a WordNet `dict` directory.
pub fn load_lexicon(dir: impl AsRef<Path>) -> Result<Lexicon, WordnetError> {
    let dir = dir.as_ref();
    let mut lex = Lexicon::default();
    for pos in PosCategory::ALL {
        let data_name = format!("data.{}", pos.file_suffix());
        let text = read_required(&dir.join(&data_name))?;
        if lex.version.is_empty() {
            if let Some(v) = detect_version(&text) {
                lex.version = v;
            }
        }
        for (i, line) in text.lines().enumerate() {
            if is_header(line) || line.trim().is_empty() {
                continue;
            }
            let synset = parse_data_line(&data_name, i + 1, line)?;
            lex.synsets.insert((pos, synset.offset), Synset { pos, ..synset });
        }
    }
    for pos in PosCategory::ALL {
        let index_name = format!("index.{}", pos.file_suffix());
        let text = read_required(&dir.join(&index_name))?;
        for (i, line) in text.lines().enumerate() {
            if is_header(line) || line.trim().is_empty() {
                continue;
            }
            let entry = parse_index_line(&index_name, i + 1, line)?;
            if entry.pos != pos {
                return Err(malformed(&index_name, i + 1, "pos does not match file"));
            }
            if let Some(&offset) = entry.offsets.iter().find(|o| !lex.synsets.contains_key(&(pos, **o))) {
                return Err(WordnetError::DanglingOffset { file: index_name, line: i + 1, offset });
            }
            lex.index.insert((entry.lemma, pos), entry.offsets);
        }
        let exc_path = dir.join(format!("{}.exc", pos.file_suffix()));
        if exc_path.is_file() {
            for line in fs::read_to_string(exc_path)?.lines() {
                let mut words = line.split_ascii_whitespace();
                if let Some(inflected) = words.next() {
                    let bases: Vec<String> = words.map(str::to_lowercase).collect();
                    if !bases.is_empty() {
                        lex.exceptions.insert((inflected.to_lowercase(), pos), bases);
                    }
                }
            }
        }
    }
    if lex.version.is_empty() {
        lex.version = "unknown".into();
    }
    Ok(lex)
}

impl Lexicon {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    pub fn synset(&self, pos: PosCategory, offset: u64) -> Option<&Synset> {
        self.synsets.get(&(pos, offset))
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// Lemma index entries, unordered.
    pub fn index_entries(&self) -> impl Iterator<Item = (&str, PosCategory, &[u64])> {
        self.index.iter().map(|((l, p), o)| (l.as_str(), *p, o.as_slice()))
    }

    /// Synsets listing `lemma` under `pos` (exact lemma, no morphology).
    pub fn synsets_for(&self, lemma: &str, pos: PosCategory) -> Vec<&Synset> {
        self.index
            .get(&(normalize(lemma), pos))
            .map(|offsets| offsets.iter().filter_map(|o| self.synsets.get(&(pos, *o))).collect())
            .unwrap_or_default()
    }

    pub fn contains(&self, lemma: &str, pos: PosCategory) -> bool {
        self.index.contains_key(&(normalize(lemma), pos))
    }

    /// Union of the lemmas of every synset containing `(lemma, pos)`, minus
    /// the lemma itself. Lookup is case-insensitive.
    pub fn synonyms(&self, lemma: &str, pos: PosCategory) -> BTreeSet<String> {
        let key = normalize(lemma);
        self.synsets_for(&key, pos)
            .into_iter()
            .flat_map(|s| s.lemmas.iter())
            .filter(|l| **l != key)
            .cloned()
            .collect()
    }

    /// Base forms of `word` under `pos` that are present in the index,
    /// using the exception lists, the irregular verb table and suffix
    /// detachment. The word itself comes first when it is indexed.
    pub fn base_forms(&self, word: &str, pos: PosCategory) -> Vec<String> {
        let word = normalize(word);
        let mut candidates: Vec<String> = Vec::new();
        if let Some(bases) = self.exceptions.get(&(word.clone(), pos)) {
            candidates.extend(bases.iter().cloned());
        }
        if pos == PosCategory::Verb {
            candidates.extend(morph::irregular_bases(&word).into_iter().map(String::from));
        }
        let mut out: Vec<String> = Vec::new();
        for cand in morph::detach(&word, pos).into_iter().chain(candidates) {
            if self.contains(&cand, pos) && !out.contains(&cand) {
                out.push(cand);
            }
        }
        out
    }

    /// Parts of speech under which `word` (or one of its base forms) is
    /// indexed.
    pub fn lookup_pos(&self, word: &str) -> BTreeSet<PosCategory> {
        PosCategory::ALL.into_iter().filter(|&p| !self.base_forms(word, p).is_empty()).collect()
    }

    /// True when `word` reduces to a verb lemma only by stripping verbal
    /// inflection (or via an irregular past form).
    pub fn is_inflected_verb(&self, word: &str) -> bool {
        let lower = normalize(word);
        has_verbal_morphology(&lower) && self.base_forms(&lower, PosCategory::Verb).iter().any(|b| *b != lower)
    }
}
