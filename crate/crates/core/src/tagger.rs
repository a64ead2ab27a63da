//! Lexicon-driven part-of-speech tagging with contextual transformation
//! rules.
//!
//! Tagging runs in two stages. The baseline gives every word its most
//! frequent lexicon reading, falling back to suffix rules and then to the
//! lexicon's default tag. Transformation rules are then applied in order;
//! each rule makes one left-to-right pass and tests its trigger against the
//! categories as they stood when that pass began.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use thiserror::Error;

use crate::text::{Span, Token, TokenKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("empty lexicon")]
    EmptyLexicon,
    #[error("invalid tag `{0}`")]
    InvalidTag(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    N,
    V,
    Adj,
    Adv,
    Prep,
    Det,
    Pro,
    Conj,
    Punct,
    Other,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::N,
        Category::V,
        Category::Adj,
        Category::Adv,
        Category::Prep,
        Category::Det,
        Category::Pro,
        Category::Conj,
        Category::Punct,
        Category::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::N => "N",
            Category::V => "V",
            Category::Adj => "ADJ",
            Category::Adv => "ADV",
            Category::Prep => "PREP",
            Category::Det => "DET",
            Category::Pro => "PRO",
            Category::Conj => "CONJ",
            Category::Punct => "PUNCT",
            Category::Other => "OTHER",
        }
    }

    /// Whether tags of this category carry gender and number.
    pub fn inflects(&self) -> bool {
        matches!(self, Category::N | Category::Adj | Category::Det | Category::Pro)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| TagError::InvalidTag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    Masculine,
    Feminine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Number {
    Singular,
    Plural,
}

/// Category plus optional gender and number, written `CAT[:g][:n]`
/// (`N:f:s`, `ADJ:p`, `V`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PosTag {
    category: Category,
    gender: Option<Gender>,
    number: Option<Number>,
}

impl PosTag {
    pub fn new(
        category: Category,
        gender: Option<Gender>,
        number: Option<Number>,
    ) -> Result<Self, TagError> {
        let tag = PosTag { category, gender, number };
        if !category.inflects() && (gender.is_some() || number.is_some()) {
            return Err(TagError::InvalidTag(tag.to_string()));
        }
        Ok(tag)
    }

    pub const fn bare(category: Category) -> Self {
        PosTag { category, gender: None, number: None }
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn gender(&self) -> Option<Gender> {
        self.gender
    }

    pub fn number(&self) -> Option<Number> {
        self.number
    }

    /// Same features under a new category; features are dropped when the
    /// new category does not inflect.
    pub fn with_category(&self, category: Category) -> Self {
        if category.inflects() {
            PosTag { category, ..*self }
        } else {
            PosTag::bare(category)
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.category.as_str())?;
        match self.gender {
            Some(Gender::Masculine) => f.write_str(":m")?,
            Some(Gender::Feminine) => f.write_str(":f")?,
            None => {}
        }
        match self.number {
            Some(Number::Singular) => f.write_str(":s"),
            Some(Number::Plural) => f.write_str(":p"),
            None => Ok(()),
        }
    }
}

impl FromStr for PosTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || TagError::InvalidTag(s.to_string());
        let mut parts = s.split(':');
        let category: Category = parts.next().unwrap_or("").parse().map_err(|_| invalid())?;
        let mut gender = None;
        let mut number = None;
        for part in parts {
            match part {
                "m" if gender.is_none() && number.is_none() => gender = Some(Gender::Masculine),
                "f" if gender.is_none() && number.is_none() => gender = Some(Gender::Feminine),
                "s" if number.is_none() => number = Some(Number::Singular),
                "p" if number.is_none() => number = Some(Number::Plural),
                _ => return Err(invalid()),
            }
        }
        PosTag::new(category, gender, number).map_err(|_| invalid())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: PosTag,
    pub lemma: String,
}

impl TaggedToken {
    pub fn category(&self) -> Category {
        self.tag.category()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub tag: PosTag,
    pub lemma: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub tag: PosTag,
}

/// Surface-form dictionary. Besides `surface\tTAG\tlemma` entries, a lexicon
/// file may contain `@suffix\tSUFFIX\tTAG` guesser rules (tried in file order)
/// and one `@default\tTAG` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: IndexMap<String, Vec<Reading>>,
    suffix_rules: Vec<SuffixRule>,
    default_tag: PosTag,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            entries: IndexMap::new(),
            suffix_rules: Vec::new(),
            default_tag: PosTag::bare(Category::N),
        }
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a reading after any existing readings of `surface`.
    pub fn insert(&mut self, surface: &str, tag: PosTag, lemma: &str) {
        self.entries
            .entry(surface.to_lowercase())
            .or_default()
            .push(Reading { tag, lemma: lemma.to_string() });
    }

    pub fn add_suffix_rule(&mut self, suffix: &str, tag: PosTag) {
        self.suffix_rules.push(SuffixRule { suffix: suffix.to_lowercase(), tag });
    }

    pub fn set_default_tag(&mut self, tag: PosTag) {
        self.default_tag = tag;
    }

    pub fn default_tag(&self) -> PosTag {
        self.default_tag
    }

    pub fn readings(&self, surface: &str) -> Option<&[Reading]> {
        self.entries.get(&surface.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn suffix_rules(&self) -> &[SuffixRule] {
        &self.suffix_rules
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TagError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| TagError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, TagError> {
        let mut lexicon = Lexicon::new();
        let mut saw_content = false;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            saw_content = true;
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            let syntax = |message: String| TagError::Syntax { line, message };
            let parse_tag = |s: &str| {
                s.parse::<PosTag>()
                    .map_err(|_| syntax(format!("invalid tag `{s}`")))
            };
            match fields.as_slice() {
                ["@suffix", suffix, tag] if !suffix.is_empty() => {
                    lexicon.add_suffix_rule(suffix, parse_tag(tag)?);
                }
                ["@default", tag] => lexicon.set_default_tag(parse_tag(tag)?),
                [directive, ..] if directive.starts_with('@') => {
                    return Err(syntax(format!("malformed directive `{trimmed}`")));
                }
                [surface, tag, lemma] if !surface.is_empty() && !lemma.is_empty() => {
                    let tag = parse_tag(tag)?;
                    lexicon.insert(surface, tag, lemma);
                }
                _ => {
                    return Err(syntax(format!(
                        "expected `surface<TAB>TAG<TAB>lemma`, got `{trimmed}`"
                    )))
                }
            }
        }
        if !saw_content {
            return Err(TagError::EmptyLexicon);
        }
        Ok(lexicon)
    }

    /// Canonical file form: directives first, then entries in insertion
    /// order, one line per reading.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if self.default_tag != PosTag::bare(Category::N) {
            out.push_str(&format!("@default\t{}\n", self.default_tag));
        }
        for rule in &self.suffix_rules {
            out.push_str(&format!("@suffix\t{}\t{}\n", rule.suffix, rule.tag));
        }
        for (surface, readings) in &self.entries {
            for r in readings {
                out.push_str(&format!("{surface}\t{}\t{}\n", r.tag, r.lemma));
            }
        }
        out
    }

    fn baseline(&self, token: &Token) -> (PosTag, String) {
        let lower = token.surface.to_lowercase();
        match token.kind {
            TokenKind::Punctuation => return (PosTag::bare(Category::Punct), lower),
            TokenKind::Number => return (PosTag::bare(Category::Other), lower),
            TokenKind::Word => {}
        }
        if let Some(first) = self.entries.get(&lower).and_then(|r| r.first()) {
            return (first.tag, first.lemma.clone());
        }
        let tag = self
            .suffix_rules
            .iter()
            .find(|r| lower.ends_with(&r.suffix))
            .map(|r| r.tag)
            .unwrap_or(self.default_tag);
        (tag, lower)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    PrevTagIs(Category),
    NextTagIs(Category),
    /// Compared against the lowercased surface.
    PrevWordIs(String),
    NextWordIs(String),
    SurroundedByTags(Category, Category),
}

/// A contextual rewrite `FROM>TO TRIGGER arg...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformationRule {
    from: Category,
    to: Category,
    trigger: Trigger,
}

impl TransformationRule {
    pub fn new(from: Category, to: Category, trigger: Trigger) -> Result<Self, TagError> {
        if from == to {
            return Err(TagError::InvalidTag(format!("{from}>{to}")));
        }
        Ok(TransformationRule { from, to, trigger })
    }

    pub fn from(&self) -> Category {
        self.from
    }

    pub fn to(&self) -> Category {
        self.to
    }

    pub fn trigger(&self) -> &Trigger {
        &self.trigger
    }

    fn fires(&self, i: usize, snapshot: &[Category], words: &[String]) -> bool {
        let prev = i.checked_sub(1);
        let next = (i + 1 < snapshot.len()).then_some(i + 1);
        match &self.trigger {
            Trigger::PrevTagIs(c) => prev.is_some_and(|p| snapshot[p] == *c),
            Trigger::NextTagIs(c) => next.is_some_and(|n| snapshot[n] == *c),
            Trigger::PrevWordIs(w) => prev.is_some_and(|p| words[p] == *w),
            Trigger::NextWordIs(w) => next.is_some_and(|n| words[n] == *w),
            Trigger::SurroundedByTags(before, after) => {
                prev.is_some_and(|p| snapshot[p] == *before)
                    && next.is_some_and(|n| snapshot[n] == *after)
            }
        }
    }
}

impl fmt::Display for TransformationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{} ", self.from, self.to)?;
        match &self.trigger {
            Trigger::PrevTagIs(c) => write!(f, "prev_tag_is {c}"),
            Trigger::NextTagIs(c) => write!(f, "next_tag_is {c}"),
            Trigger::PrevWordIs(w) => write!(f, "prev_word_is {w}"),
            Trigger::NextWordIs(w) => write!(f, "next_word_is {w}"),
            Trigger::SurroundedByTags(a, b) => write!(f, "surrounded_by_tags {a} {b}"),
        }
    }
}

impl FromStr for TransformationRule {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || TagError::InvalidTag(s.to_string());
        let mut words = s.split_whitespace();
        let (from, to) = words.next().and_then(|w| w.split_once('>')).ok_or_else(invalid)?;
        let from: Category = from.parse()?;
        let to: Category = to.parse()?;
        let name = words.next().ok_or_else(invalid)?;
        let args: Vec<&str> = words.collect();
        let trigger = match (name, args.as_slice()) {
            ("prev_tag_is", [c]) => Trigger::PrevTagIs(c.parse()?),
            ("next_tag_is", [c]) => Trigger::NextTagIs(c.parse()?),
            ("prev_word_is", [w]) => Trigger::PrevWordIs(w.to_lowercase()),
            ("next_word_is", [w]) => Trigger::NextWordIs(w.to_lowercase()),
            ("surrounded_by_tags", [a, b]) => Trigger::SurroundedByTags(a.parse()?, b.parse()?),
            _ => return Err(invalid()),
        };
        TransformationRule::new(from, to, trigger)
    }
}

pub fn parse_rules(text: &str) -> Result<Vec<TransformationRule>, TagError> {
    let mut rules = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rule = trimmed.parse().map_err(|e: TagError| TagError::Syntax {
            line: n + 1,
            message: e.to_string(),
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<Vec<TransformationRule>, TagError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| TagError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_rules(&text)
}

/// Tags one sentence.
pub fn tag(tokens: &[Token], lexicon: &Lexicon, rules: &[TransformationRule]) -> Vec<TaggedToken> {
    let mut tagged: Vec<TaggedToken> = tokens
        .iter()
        .map(|token| {
            let (tag, lemma) = lexicon.baseline(token);
            TaggedToken { token: token.clone(), tag, lemma }
        })
        .collect();
    if rules.is_empty() {
        return tagged;
    }
    let words: Vec<String> = tokens.iter().map(|t| t.surface.to_lowercase()).collect();
    for rule in rules {
        apply_rule(rule, &mut tagged, &words, lexicon);
    }
    tagged
}

fn apply_rule(
    rule: &TransformationRule,
    tagged: &mut [TaggedToken],
    words: &[String],
    lexicon: &Lexicon,
) {
    let snapshot: Vec<Category> = tagged.iter().map(TaggedToken::category).collect();
    for i in 0..tagged.len() {
        if snapshot[i] != rule.from || !rule.fires(i, &snapshot, words) {
            continue;
        }
        let t = &mut tagged[i];
        // prefer the lexicon's own reading for the new category
        let reading = lexicon
            .readings(&t.token.surface)
            .and_then(|rs| rs.iter().find(|r| r.tag.category() == rule.to));
        match reading {
            Some(r) => {
                t.tag = r.tag;
                t.lemma = r.lemma.clone();
            }
            None => t.tag = t.tag.with_category(rule.to),
        }
    }
}

/// Writes sentences in the pre-tagged interchange format: one
/// `surface\tTAG\tlemma` line per token and a blank line after every
/// sentence.
pub fn write_pretagged<'a, I>(sentences: I) -> String
where
    I: IntoIterator<Item = &'a [TaggedToken]>,
{
    let mut out = String::new();
    for sentence in sentences {
        for t in sentence {
            out.push_str(&format!("{}\t{}\t{}\n", t.token.surface, t.tag, t.lemma));
        }
        out.push('\n');
    }
    out
}

/// Reads pre-tagged input. Token spans refer to a reconstructed text in which
/// tokens of a sentence are joined by single spaces and sentences by a
/// newline; [`pretagged_text`] rebuilds that text.
pub fn read_pretagged(text: &str) -> Result<Vec<Vec<TaggedToken>>, TagError> {
    let mut sentences = Vec::new();
    let mut current: Vec<TaggedToken> = Vec::new();
    let mut offset = 0;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [surface, tag, lemma] = fields.as_slice() else {
            return Err(TagError::Syntax {
                line,
                message: format!("expected `surface<TAB>TAG<TAB>lemma`, got `{raw}`"),
            });
        };
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(TagError::Syntax { line, message: format!("bad surface `{surface}`") });
        }
        let tag: PosTag = tag.parse().map_err(|e: TagError| TagError::Syntax {
            line,
            message: e.to_string(),
        })?;
        let gap = match (current.is_empty(), sentences.is_empty()) {
            (false, _) => " ",
            (true, false) => "\n",
            (true, true) => "",
        };
        offset += gap.chars().count();
        let len = surface.chars().count();
        let kind = infer_kind(surface, tag);
        current.push(TaggedToken {
            token: Token {
                surface: surface.to_string(),
                span: Span::new(offset, offset + len),
                preceding_gap: gap.to_string(),
                kind,
            },
            tag,
            lemma: lemma.to_string(),
        });
        offset += len;
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

/// The text that [`read_pretagged`] spans point into.
pub fn pretagged_text(sentences: &[Vec<TaggedToken>]) -> String {
    let mut out = String::new();
    for t in sentences.iter().flatten() {
        out.push_str(&t.token.preceding_gap);
        out.push_str(&t.token.surface);
    }
    out
}

fn infer_kind(surface: &str, tag: PosTag) -> TokenKind {
    if tag.category() == Category::Punct || !surface.chars().any(char::is_alphanumeric) {
        TokenKind::Punctuation
    } else if surface.chars().next().is_some_and(char::is_numeric)
        && surface.chars().all(|c| c.is_numeric() || c == '.' || c == ',')
    {
        TokenKind::Number
    } else {
        TokenKind::Word
    }
}
