//! Tokenization and the schema-instance data model.
//!
//! Token positions are 1-based throughout the crate: index 2 of
//! "Kevin yelled at Jim because he was so upset." is `yelled`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characters split off the edges of whitespace-delimited chunks.
pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\''];

/// Surface form of the blank that stands in for the target pronoun.
pub const BLANK: &str = "_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("EmptyText: input is empty after trimming")]
    EmptyText,
    #[error("InvalidInstance: {0:?}")]
    InvalidInstance(Vec<Violation>),
    #[error("InvalidToken: {0:?} is not a valid token surface")]
    InvalidToken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punctuation,
    Blank,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    surface: String,
    kind: TokenKind,
}

impl Token {
    pub fn word(surface: impl Into<String>) -> Result<Self, TextError> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) || surface == BLANK {
            return Err(TextError::InvalidToken(surface));
        }
        Ok(Self { surface, kind: TokenKind::Word })
    }

    pub fn punctuation(mark: char) -> Result<Self, TextError> {
        if !PUNCTUATION.contains(&mark) {
            return Err(TextError::InvalidToken(mark.to_string()));
        }
        Ok(Self { surface: mark.to_string(), kind: TokenKind::Punctuation })
    }

    pub fn blank() -> Self {
        Self { surface: BLANK.to_string(), kind: TokenKind::Blank }
    }

    /// Classifies a single whitespace-free chunk the way the tokenizer would,
    /// without splitting it.
    pub fn classify(surface: &str) -> Result<Self, TextError> {
        if surface == BLANK {
            return Ok(Self::blank());
        }
        let mut chars = surface.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if PUNCTUATION.contains(&c) {
                return Self::punctuation(c);
            }
        }
        Self::word(surface)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn is_blank(&self) -> bool {
        self.kind == TokenKind::Blank
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    /// 1-based positions of every blank token.
    pub fn blank_positions(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_blank())
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::surface).collect()
    }
}

impl FromIterator<Token> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        Self { tokens: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a TokenSequence {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&detokenize(self))
    }
}

/// Splits on whitespace, then peels leading and trailing punctuation marks
/// off each chunk. Apostrophes inside a word stay attached.
pub fn tokenize(text: &str) -> Result<TokenSequence, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    Ok(TokenSequence { tokens })
}

fn split_chunk(chunk: &str, out: &mut Vec<Token>) {
    let is_mark = |c: char| PUNCTUATION.contains(&c);
    if chunk.chars().all(is_mark) {
        out.extend(chunk.chars().map(|c| Token { surface: c.to_string(), kind: TokenKind::Punctuation }));
        return;
    }
    let core_start = chunk.find(|c: char| !is_mark(c)).unwrap_or(0);
    let core_end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_mark(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(chunk.len());

    for c in chunk[..core_start].chars() {
        out.push(Token { surface: c.to_string(), kind: TokenKind::Punctuation });
    }
    let core = &chunk[core_start..core_end];
    let kind = if core == BLANK { TokenKind::Blank } else { TokenKind::Word };
    out.push(Token { surface: core.to_string(), kind });
    for c in chunk[core_end..].chars() {
        out.push(Token { surface: c.to_string(), kind: TokenKind::Punctuation });
    }
}

/// Joins words with single spaces; punctuation attaches to the preceding
/// token. Double quotes alternate between opening (space before, none
/// after) and closing (attached) so quoted speech reads naturally.
pub fn detokenize(seq: &TokenSequence) -> String {
    let mut out = String::new();
    let mut quote_open = false;
    let mut glue_next = false;
    for (i, token) in seq.tokens.iter().enumerate() {
        let opening_quote = token.kind == TokenKind::Punctuation && token.surface == "\"" && !quote_open;
        let attach = token.kind == TokenKind::Punctuation && !opening_quote;
        if i > 0 && !attach && !glue_next {
            out.push(' ');
        }
        out.push_str(&token.surface);
        glue_next = opening_quote;
        if token.surface == "\"" && token.kind == TokenKind::Punctuation {
            quote_open = !quote_open;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstanceId(pub u64);

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which of the two options fills the blank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    One,
    Two,
}

impl Choice {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Choice::One),
            2 => Some(Choice::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Choice::One => 1,
            Choice::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Choice::One => Choice::Two,
            Choice::Two => Choice::One,
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl Serialize for Choice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Choice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Choice::from_number(n).ok_or_else(|| serde::de::Error::custom(format!("choice must be 1 or 2, got {n}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Seed,
    Human,
    Chatgpt,
    Wordnet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WscInstance {
    pub id: InstanceId,
    pub tokens: TokenSequence,
    pub option1: String,
    pub option2: String,
    pub answer: Choice,
    pub depth: u32,
    pub parent_id: Option<InstanceId>,
    pub source: Source,
}

impl WscInstance {
    /// A depth-0 seed instance.
    pub fn seed(id: InstanceId, sentence: &str, option1: &str, option2: &str, answer: Choice) -> Result<Self, TextError> {
        Ok(Self {
            id,
            tokens: tokenize(sentence)?,
            option1: option1.to_string(),
            option2: option2.to_string(),
            answer,
            depth: 0,
            parent_id: None,
            source: Source::Seed,
        })
    }

    pub fn sentence(&self) -> String {
        detokenize(&self.tokens)
    }

    pub fn option(&self, choice: Choice) -> &str {
        match choice {
            Choice::One => &self.option1,
            Choice::Two => &self.option2,
        }
    }

    pub fn is_seed(&self) -> bool {
        self.parent_id.is_none()
    }
}

/// Per-instance resolution, as produced by a model or an annotator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledResolution {
    pub instance_id: InstanceId,
    pub chosen: Choice,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "violation", content = "detail")]
pub enum Violation {
    MissingBlank,
    MultipleBlanks(usize),
    EmptyOption(u8),
    DuplicateOptions,
    DepthParentMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingBlank => f.write_str("MissingBlank"),
            Violation::MultipleBlanks(n) => write!(f, "MultipleBlanks({n})"),
            Violation::EmptyOption(n) => write!(f, "EmptyOption({n})"),
            Violation::DuplicateOptions => f.write_str("DuplicateOptions"),
            Violation::DepthParentMismatch => f.write_str("DepthParentMismatch"),
        }
    }
}

/// Structural checks over an instance; reports every violation found.
pub fn validate_instance(inst: &WscInstance) -> Result<(), Vec<Violation>> {
    let mut violations = validate_fields(&inst.tokens, &inst.option1, &inst.option2);
    if (inst.depth == 0) != inst.parent_id.is_none() {
        violations.push(Violation::DepthParentMismatch);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// The sentence/option checks shared by instances and raw requests.
pub fn validate_fields(tokens: &TokenSequence, option1: &str, option2: &str) -> Vec<Violation> {
    let mut violations = Vec::new();
    match tokens.blank_positions().len() {
        0 => violations.push(Violation::MissingBlank),
        1 => {}
        n => violations.push(Violation::MultipleBlanks(n)),
    }
    let o1 = option1.trim();
    let o2 = option2.trim();
    if o1.is_empty() {
        violations.push(Violation::EmptyOption(1));
    }
    if o2.is_empty() {
        violations.push(Violation::EmptyOption(2));
    }
    if !o1.is_empty() && o1 == o2 {
        violations.push(Violation::DuplicateOptions);
    }
    violations
}

/// Detokenized sentence with the blank replaced verbatim by the chosen option.
pub fn resolve_blank(inst: &WscInstance, choice: Choice) -> Result<String, TextError> {
    let violations = validate_fields(&inst.tokens, &inst.option1, &inst.option2);
    if !violations.is_empty() {
        return Err(TextError::InvalidInstance(violations));
    }
    let option = inst.option(choice).trim();
    let filled: Vec<Token> = inst
        .tokens
        .iter()
        .map(|t| {
            if t.is_blank() {
                // Multi-word options are substituted as one surface string.
                Token { surface: option.to_string(), kind: TokenKind::Word }
            } else {
                t.clone()
            }
        })
        .collect();
    Ok(detokenize(&TokenSequence::new(filled)))
}
