//! Per-clue judgment counts and the relevance ratio.
//!
//! A record can be computed from hand-made judgments, in which case the
//! three figurative counts always add up to `total`, or imported verbatim
//! from recorded figures, where a mismatch only raises a warning.

use std::collections::HashSet;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use thiserror::Error;

use crate::catalog::ClueDefinition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelevanceError {
    #[error("total {total} exceeds occurrences {occurrences}")]
    TotalExceedsOccurrences { total: u64, occurrences: u64 },
    #[error("duplicate judgment {clue} {doc} {sentence} {unit}")]
    DuplicateJudgment { clue: String, doc: String, sentence: usize, unit: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Exact, unreduced fraction. Equality and ordering compare values, so
/// `20/40 == 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    numer: u64,
    denom: u64,
}

impl Ratio {
    /// `None` when `denom` is zero.
    pub fn new(numer: u64, denom: u64) -> Option<Self> {
        (denom > 0).then_some(Ratio { numer, denom })
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn to_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Four decimals, as used in reports.
    pub fn decimal(&self) -> String {
        format!("{:.4}", self.to_f64())
    }

    fn cross(&self, other: &Ratio) -> (u128, u128) {
        (
            self.numer as u128 * other.denom as u128,
            other.numer as u128 * self.denom as u128,
        )
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.cross(other);
        a == b
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = self.cross(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("bad ratio `{s}`"))?;
        let n = n.parse().map_err(|_| format!("bad ratio `{s}`"))?;
        let d = d.parse().map_err(|_| format!("bad ratio `{s}`"))?;
        Ratio::new(n, d).ok_or_else(|| format!("zero denominator in `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct RelevanceRecord {
    pub occurrences: u64,
    pub conventional: u64,
    pub new: u64,
    pub metaphoric_contexts: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Imported {
    pub record: RelevanceRecord,
    pub warnings: Vec<String>,
}

impl RelevanceRecord {
    /// Takes recorded counts verbatim, in the order occurrences, conventional,
    /// new, metaphoric contexts, total.
    pub fn import(counts: [u64; 5]) -> Result<Imported, RelevanceError> {
        let [occurrences, conventional, new, metaphoric_contexts, total] = counts;
        let record = RelevanceRecord { occurrences, conventional, new, metaphoric_contexts, total };
        if total > occurrences {
            return Err(RelevanceError::TotalExceedsOccurrences { total, occurrences });
        }
        Ok(Imported { warnings: record.warnings(), record })
    }

    pub fn counts(&self) -> [u64; 5] {
        [self.occurrences, self.conventional, self.new, self.metaphoric_contexts, self.total]
    }

    pub fn category_sum(&self) -> u64 {
        self.conventional + self.new + self.metaphoric_contexts
    }

    pub fn warnings(&self) -> Vec<String> {
        let sum = self.category_sum();
        if sum != self.total {
            vec![format!(
                "category counts sum to {sum} ({} + {} + {}) but total is {}",
                self.conventional, self.new, self.metaphoric_contexts, self.total
            )]
        } else {
            Vec::new()
        }
    }

    /// `total / occurrences`, absent when there are no occurrences.
    pub fn ratio(&self) -> Option<Ratio> {
        Ratio::new(self.total, self.occurrences)
    }

    pub fn merge(&self, other: &RelevanceRecord) -> RelevanceRecord {
        RelevanceRecord {
            occurrences: self.occurrences + other.occurrences,
            conventional: self.conventional + other.conventional,
            new: self.new + other.new,
            metaphoric_contexts: self.metaphoric_contexts + other.metaphoric_contexts,
            total: self.total + other.total,
        }
    }
}

impl Add for RelevanceRecord {
    type Output = RelevanceRecord;

    fn add(self, rhs: Self) -> Self::Output {
        self.merge(&rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Conventional,
    New,
    MetaphoricContext,
    None,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Conventional => "conventional",
            Label::New => "new",
            Label::MetaphoricContext => "metaphoric_context",
            Label::None => "none",
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conventional" => Ok(Label::Conventional),
            "new" => Ok(Label::New),
            "metaphoric_context" => Ok(Label::MetaphoricContext),
            "none" => Ok(Label::None),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub clue_name: String,
    pub doc_id: String,
    pub sentence_index: usize,
    pub unit_index: usize,
    pub label: Label,
}

impl Judgment {
    fn key(&self) -> (&str, &str, usize, usize) {
        (&self.clue_name, &self.doc_id, self.sentence_index, self.unit_index)
    }

    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.clue_name,
            self.doc_id,
            self.sentence_index,
            self.unit_index,
            self.label.as_str()
        )
    }
}

/// `clue\tdoc\tsentence\tunit\tlabel` lines; `#` starts a comment line.
pub fn parse_judgments(text: &str) -> Result<Vec<Judgment>, RelevanceError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let syntax = |message: String| RelevanceError::Syntax { line, message };
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        let [clue, doc, sentence, unit, label] = fields.as_slice() else {
            return Err(syntax(format!("expected 5 tab-separated fields, got {}", fields.len())));
        };
        out.push(Judgment {
            clue_name: clue.to_string(),
            doc_id: doc.to_string(),
            sentence_index: sentence
                .parse()
                .map_err(|_| syntax(format!("bad sentence index `{sentence}`")))?,
            unit_index: unit.parse().map_err(|_| syntax(format!("bad unit index `{unit}`")))?,
            label: label.parse().map_err(syntax)?,
        });
    }
    Ok(out)
}

/// Fails on the first repeated (clue, document, sentence, unit) key.
pub fn check_unique(judgments: &[Judgment]) -> Result<(), RelevanceError> {
    let mut seen = HashSet::new();
    for j in judgments {
        if !seen.insert(j.key()) {
            return Err(RelevanceError::DuplicateJudgment {
                clue: j.clue_name.clone(),
                doc: j.doc_id.clone(),
                sentence: j.sentence_index,
                unit: j.unit_index,
            });
        }
    }
    Ok(())
}

/// Counts the judgments of one clue. An unknown clue yields all zeros.
pub fn compute_relevance(
    judgments: &[Judgment],
    clue_name: &str,
) -> Result<RelevanceRecord, RelevanceError> {
    check_unique(judgments)?;
    let mut record = RelevanceRecord::default();
    for j in judgments.iter().filter(|j| j.clue_name == clue_name) {
        record.occurrences += 1;
        match j.label {
            Label::Conventional => record.conventional += 1,
            Label::New => record.new += 1,
            Label::MetaphoricContext => record.metaphoric_contexts += 1,
            Label::None => {}
        }
    }
    record.total = record.category_sum();
    Ok(record)
}

/// The clue's relevance ratio, read as the probability that an occurrence
/// carries a non-literal meaning.
pub fn nonliteral_probability(clue: &ClueDefinition) -> Option<Ratio> {
    clue.relevance.as_ref().and_then(RelevanceRecord::ratio)
}
