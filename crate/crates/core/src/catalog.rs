//! Clue catalog: the clue model, its text format, and validation.
//!
//! A catalog file is a sequence of line-oriented blocks:
//!
//! ```text
//! # optional, defaults to PUNCT ADV
//! skip PUNCT ADV
//!
//! clue B.2.2.2
//!   type metaphor-analogy
//!   comment comparison involving the meaning of a marker
//!   ssp GN_0 GN_1 V_1 Adj_0 [prep] GN_2
//!   lm Adj_0 = pareil | semblable
//!   target GN_1
//!   source GN_2
//!   relevance 28 3 2 12 15
//! ```
//!
//! Field lines are indented; `clue` and `skip` lines are not. Bracketed SSP
//! elements are optional. An element without a `_N` label gets index 0 and
//! cannot be used as a marker, target or source slot. The relevance counts
//! are occurrences, conventional, new, metaphoric contexts and total.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chunker::UnitKind;
use crate::relevance::RelevanceRecord;
use crate::tagger::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotCategory {
    Gn,
    Gv,
    V,
    Adj,
    Adv,
    Prep,
    Det,
    Pro,
    Conj,
    Tok,
}

impl SlotCategory {
    pub const ALL: [SlotCategory; 10] = [
        SlotCategory::Gn,
        SlotCategory::Gv,
        SlotCategory::V,
        SlotCategory::Adj,
        SlotCategory::Adv,
        SlotCategory::Prep,
        SlotCategory::Det,
        SlotCategory::Pro,
        SlotCategory::Conj,
        SlotCategory::Tok,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SlotCategory::Gn => "GN",
            SlotCategory::Gv => "GV",
            SlotCategory::V => "V",
            SlotCategory::Adj => "Adj",
            SlotCategory::Adv => "Adv",
            SlotCategory::Prep => "prep",
            SlotCategory::Det => "det",
            SlotCategory::Pro => "pro",
            SlotCategory::Conj => "conj",
            SlotCategory::Tok => "tok",
        }
    }
}

impl fmt::Display for SlotCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SlotCategory::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown pattern category `{s}`"))
    }
}

/// A labeled position in an SSP, written `GN_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub category: SlotCategory,
    pub index: u32,
}

impl Slot {
    pub fn new(category: SlotCategory, index: u32) -> Self {
        Slot { category, index }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.category, self.index)
    }
}

impl FromStr for Slot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.rsplit_once('_') {
            Some((cat, index)) => {
                let index = index.parse().map_err(|_| format!("bad slot index in `{s}`"))?;
                Ok(Slot::new(cat.parse()?, index))
            }
            // accepted so the validator can report the unlabeled reference
            None => Ok(Slot::new(s.parse()?, 0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternElement {
    pub category: SlotCategory,
    pub index: u32,
    /// False for elements written without `_N`; they get index 0.
    pub labeled: bool,
    pub optional: bool,
}

impl PatternElement {
    pub fn slot(&self) -> Slot {
        Slot::new(self.category, self.index)
    }
}

impl fmt::Display for PatternElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.labeled {
            self.slot().to_string()
        } else {
            self.category.to_string()
        };
        if self.optional {
            write!(f, "[{body}]")
        } else {
            f.write_str(&body)
        }
    }
}

impl FromStr for PatternElement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, optional) = match s.strip_prefix('[') {
            Some(rest) => (
                rest.strip_suffix(']').ok_or_else(|| format!("unclosed `[` in `{s}`"))?,
                true,
            ),
            None => (s, false),
        };
        let labeled = body.contains('_');
        let slot: Slot = body.parse()?;
        Ok(PatternElement { category: slot.category, index: slot.index, labeled, optional })
    }
}

pub fn parse_ssp(text: &str) -> Result<Vec<PatternElement>, String> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_ssp(ssp: &[PatternElement]) -> String {
    ssp.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerConstraint {
    pub slot: Slot,
    /// Lowercased lemmas.
    pub lexemes: BTreeSet<String>,
}

impl MarkerConstraint {
    pub fn new<I, S>(slot: Slot, lexemes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        MarkerConstraint {
            slot,
            lexemes: lexemes.into_iter().map(|l| l.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn accepts(&self, lemma: &str) -> bool {
        self.lexemes.contains(&lemma.to_lowercase())
    }
}

impl fmt::Display for MarkerConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lexemes: Vec<&str> = self.lexemes.iter().map(String::as_str).collect();
        write!(f, "{} = {}", self.slot, lexemes.join(" | "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClueType {
    MetaphorAnalogy,
    Metaphor,
    Analogy,
    Context,
}

impl ClueType {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClueType::MetaphorAnalogy => "metaphor-analogy",
            ClueType::Metaphor => "metaphor",
            ClueType::Analogy => "analogy",
            ClueType::Context => "context",
        }
    }
}

impl FromStr for ClueType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "metaphor-analogy" => Ok(ClueType::MetaphorAnalogy),
            "metaphor" => Ok(ClueType::Metaphor),
            "analogy" => Ok(ClueType::Analogy),
            "context" => Ok(ClueType::Context),
            _ => Err(format!("unknown clue type `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueDefinition {
    pub clue_type: ClueType,
    pub name: String,
    pub comment: String,
    pub ssp: Vec<PatternElement>,
    pub lm: MarkerConstraint,
    pub target_slot: Option<Slot>,
    pub source_slot: Option<Slot>,
    pub relevance: Option<RelevanceRecord>,
}

impl ClueDefinition {
    pub fn element(&self, slot: Slot) -> Option<&PatternElement> {
        self.ssp.iter().find(|e| e.slot() == slot)
    }

    pub fn element_index(&self, slot: Slot) -> Option<usize> {
        self.ssp.iter().position(|e| e.labeled && e.slot() == slot)
    }
}

/// What the matcher may step over between aligned elements: a whole chunk
/// kind (`GN`, `GV`, `TOK`) or free tokens of one category (`PUNCT`, `ADV`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkipClass {
    Category(Category),
    Kind(UnitKind),
}

impl fmt::Display for SkipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipClass::Kind(k) => f.write_str(k.as_str()),
            SkipClass::Category(c) => f.write_str(c.as_str()),
        }
    }
}

impl FromStr for SkipClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "GN" => Ok(SkipClass::Kind(UnitKind::Gn)),
            "GV" => Ok(SkipClass::Kind(UnitKind::Gv)),
            "TOK" => Ok(SkipClass::Kind(UnitKind::Tok)),
            _ => s
                .parse::<Category>()
                .map(SkipClass::Category)
                .map_err(|_| format!("unknown skip class `{s}`")),
        }
    }
}

pub fn default_skip() -> BTreeSet<SkipClass> {
    [SkipClass::Category(Category::Punct), SkipClass::Category(Category::Adv)]
        .into_iter()
        .collect()
}

pub fn parse_skip_list(text: &str) -> Result<BTreeSet<SkipClass>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub clues: Vec<ClueDefinition>,
    pub skip: BTreeSet<SkipClass>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog { clues: Vec::new(), skip: default_skip() }
    }
}

impl Catalog {
    pub fn clue(&self, name: &str) -> Option<&ClueDefinition> {
        self.clues.iter().find(|c| c.name == name)
    }

    /// Non-fatal findings, currently relevance counts whose categories do
    /// not add up to the recorded total.
    pub fn warnings(&self) -> Vec<Diagnostic> {
        self.clues
            .iter()
            .flat_map(|c| {
                c.relevance.iter().flat_map(RelevanceRecord::warnings).map(|message| Diagnostic {
                    clue: c.name.clone(),
                    kind: DiagnosticKind::RelevanceSumMismatch,
                    message,
                })
            })
            .collect()
    }

    /// Every invariant violation, including name clashes between clues.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut names = HashSet::new();
        for clue in &self.clues {
            if !names.insert(clue.name.as_str()) {
                out.push(Diagnostic {
                    clue: clue.name.clone(),
                    kind: DiagnosticKind::DuplicateName,
                    message: format!("duplicate clue name `{}`", clue.name),
                });
            }
            out.extend(validate_clue(clue));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    EmptyName,
    EmptyPattern,
    DuplicateElement,
    UnknownSlot,
    UnlabeledSlot,
    EmptyLexemes,
    BadLexeme,
    TargetIsSource,
    RelevanceTotalExceedsOccurrences,
    DuplicateName,
    RelevanceSumMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub clue: String,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clue, self.message)
    }
}

pub fn validate_clue(clue: &ClueDefinition) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, message: String| {
        out.push(Diagnostic { clue: clue.name.clone(), kind, message })
    };
    if clue.name.is_empty() || clue.name.chars().any(char::is_whitespace) {
        push(DiagnosticKind::EmptyName, format!("invalid clue name `{}`", clue.name));
    }
    if clue.ssp.is_empty() {
        push(DiagnosticKind::EmptyPattern, "empty SSP".into());
    }
    let mut seen = HashSet::new();
    for e in &clue.ssp {
        if !seen.insert(e.slot()) {
            push(DiagnosticKind::DuplicateElement, format!("duplicate SSP element {}", e.slot()));
        }
    }
    let roles = [("lm", Some(clue.lm.slot)), ("target", clue.target_slot), ("source", clue.source_slot)];
    for (role, slot) in roles {
        let Some(slot) = slot else { continue };
        match clue.element(slot) {
            None => push(DiagnosticKind::UnknownSlot, format!("{role}: unknown slot {slot}")),
            Some(e) if !e.labeled => push(
                DiagnosticKind::UnlabeledSlot,
                format!("{role}: unlabeled element {} cannot be a slot", e.category),
            ),
            Some(_) => {}
        }
    }
    if clue.lm.lexemes.is_empty() {
        push(DiagnosticKind::EmptyLexemes, "marker has no lexemes".into());
    }
    for lexeme in &clue.lm.lexemes {
        if lexeme.is_empty() || lexeme.chars().any(|c| c.is_whitespace() || c == '|') {
            push(DiagnosticKind::BadLexeme, format!("invalid lexeme `{lexeme}`"));
        }
    }
    if let (Some(t), Some(s)) = (clue.target_slot, clue.source_slot) {
        if t == s {
            push(DiagnosticKind::TargetIsSource, format!("target and source are both {t}"));
        }
    }
    if let Some(r) = &clue.relevance {
        if r.total > r.occurrences {
            push(
                DiagnosticKind::RelevanceTotalExceedsOccurrences,
                format!("relevance total {} exceeds occurrences {}", r.total, r.occurrences),
            );
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate clue name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: {}", join_diagnostics(.diagnostics))]
    Invalid { line: usize, diagnostics: Vec<Diagnostic> },
}

fn join_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Default)]
struct PendingClue {
    line: usize,
    name: String,
    clue_type: Option<ClueType>,
    comment: Option<String>,
    ssp: Option<Vec<PatternElement>>,
    lm: Option<MarkerConstraint>,
    target: Option<Slot>,
    source: Option<Slot>,
    relevance: Option<RelevanceRecord>,
    seen_keys: HashSet<&'static str>,
}

impl PendingClue {
    fn set_field(&mut self, line: usize, key: &str, value: &str) -> Result<(), CatalogError> {
        let syntax = |message: String| CatalogError::Syntax { line, message };
        let key: &'static str = match key {
            "type" => "type",
            "comment" => "comment",
            "ssp" => "ssp",
            "lm" => "lm",
            "target" => "target",
            "source" => "source",
            "relevance" => "relevance",
            other => return Err(syntax(format!("unknown key `{other}`"))),
        };
        if !self.seen_keys.insert(key) {
            return Err(syntax(format!("repeated key `{key}`")));
        }
        match key {
            "type" => self.clue_type = Some(value.parse().map_err(syntax)?),
            "comment" => self.comment = Some(value.to_string()),
            "ssp" => self.ssp = Some(parse_ssp(value).map_err(syntax)?),
            "lm" => {
                let (slot, lexemes) = value
                    .split_once('=')
                    .ok_or_else(|| syntax(format!("expected `SLOT = lexeme | ...`, got `{value}`")))?;
                let slot: Slot = slot.trim().parse().map_err(syntax)?;
                let lexemes: Vec<&str> = lexemes.split('|').map(str::trim).collect();
                if lexemes.iter().any(|l| l.is_empty()) {
                    return Err(syntax(format!("empty lexeme in `{value}`")));
                }
                self.lm = Some(MarkerConstraint::new(slot, lexemes));
            }
            "target" => self.target = Some(value.parse().map_err(syntax)?),
            "source" => self.source = Some(value.parse().map_err(syntax)?),
            "relevance" => {
                let counts: Vec<u64> = value
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| syntax(format!("relevance counts must be integers: `{value}`")))?;
                let [occurrences, conventional, new, metaphoric_contexts, total] = counts[..] else {
                    return Err(syntax(format!("relevance needs 5 counts, got {}", counts.len())));
                };
                self.relevance = Some(RelevanceRecord {
                    occurrences,
                    conventional,
                    new,
                    metaphoric_contexts,
                    total,
                });
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn finish(self) -> Result<ClueDefinition, CatalogError> {
        let missing = |key: &str| CatalogError::Syntax {
            line: self.line,
            message: format!("clue `{}` has no `{key}`", self.name),
        };
        let clue = ClueDefinition {
            clue_type: self.clue_type.ok_or_else(|| missing("type"))?,
            ssp: self.ssp.clone().ok_or_else(|| missing("ssp"))?,
            lm: self.lm.clone().ok_or_else(|| missing("lm"))?,
            name: self.name,
            comment: self.comment.unwrap_or_default(),
            target_slot: self.target,
            source_slot: self.source,
            relevance: self.relevance,
        };
        let diagnostics = validate_clue(&clue);
        if diagnostics.is_empty() {
            Ok(clue)
        } else {
            Err(CatalogError::Invalid { line: self.line, diagnostics })
        }
    }
}

pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let mut catalog = Catalog::default();
    let mut skip_seen = false;
    let mut pending: Option<PendingClue> = None;
    let mut names = HashSet::new();

    let mut flush = |pending: Option<PendingClue>, catalog: &mut Catalog| -> Result<(), CatalogError> {
        if let Some(p) = pending {
            let line = p.line;
            let clue = p.finish()?;
            if !names.insert(clue.name.clone()) {
                return Err(CatalogError::DuplicateName { line, name: clue.name });
            }
            catalog.clues.push(clue);
        }
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = match trimmed.split_once(char::is_whitespace) {
            Some((k, v)) => (k, v.trim()),
            None => (trimmed, ""),
        };
        let indented = raw.starts_with(char::is_whitespace);
        let syntax = |message: String| CatalogError::Syntax { line, message };
        if indented {
            let Some(p) = pending.as_mut() else {
                return Err(syntax(format!("field `{key}` outside of a clue block")));
            };
            p.set_field(line, key, value)?;
            continue;
        }
        match key {
            "clue" => {
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(syntax(format!("expected `clue NAME`, got `{trimmed}`")));
                }
                flush(pending.take(), &mut catalog)?;
                pending = Some(PendingClue { line, name: value.to_string(), ..Default::default() });
            }
            "skip" => {
                if skip_seen {
                    return Err(syntax("repeated `skip` line".into()));
                }
                skip_seen = true;
                catalog.skip = parse_skip_list(value).map_err(syntax)?;
            }
            other => return Err(syntax(format!("unknown key `{other}`"))),
        }
    }
    flush(pending.take(), &mut catalog)?;
    Ok(catalog)
}

/// Canonical text form; `parse_catalog` reads it back to an equal catalog.
pub fn serialize_catalog(catalog: &Catalog) -> String {
    let mut out = String::new();
    if catalog.skip != default_skip() {
        let classes: Vec<String> = catalog.skip.iter().map(ToString::to_string).collect();
        if classes.is_empty() {
            out.push_str("skip\n");
        } else {
            out.push_str(&format!("skip {}\n", classes.join(" ")));
        }
    }
    for (i, clue) in catalog.clues.iter().enumerate() {
        if i > 0 || !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("clue {}\n", clue.name));
        out.push_str(&format!("  type {}\n", clue.clue_type.as_str()));
        if !clue.comment.is_empty() {
            out.push_str(&format!("  comment {}\n", clue.comment));
        }
        out.push_str(&format!("  ssp {}\n", format_ssp(&clue.ssp)));
        out.push_str(&format!("  lm {}\n", clue.lm));
        if let Some(t) = clue.target_slot {
            out.push_str(&format!("  target {t}\n"));
        }
        if let Some(s) = clue.source_slot {
            out.push_str(&format!("  source {s}\n"));
        }
        if let Some(r) = &clue.relevance {
            let [a, b, c, d, e] = r.counts();
            out.push_str(&format!("  relevance {a} {b} {c} {d} {e}\n"));
        }
    }
    out
}
