//! End-to-end annotation: tokenize, tag, chunk and match documents, then
//! emit standoff records, inline marks and per-clue corpus statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{Catalog, SkipClass};
use crate::chunker::{chunk, Unit};
use crate::matcher::{match_all_with, Match, MatchMode};
use crate::relevance::{nonliteral_probability, Ratio};
use crate::tagger::{tag, Lexicon, TaggedToken, TransformationRule};
use crate::text::{CharIndex, Document, SentenceSplitter, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub doc_id: String,
    pub sentence_index: usize,
    pub clue_name: String,
    /// First bound unit of the match; not part of the standoff line.
    pub first_unit: Option<usize>,
    pub span: Span,
    pub target_span: Option<Span>,
    pub source_span: Option<Span>,
    pub marker_surface: String,
    pub probability: Option<Ratio>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StandoffError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl AnnotationRecord {
    /// `doc sentence clue start len target_start target_len source_start
    /// source_len marker prob`, tab-separated, `-` for absent values.
    pub fn to_standoff(&self) -> String {
        let opt = |s: Option<Span>| match s {
            Some(s) => format!("{}\t{}", s.start, s.len()),
            None => "-\t-".to_string(),
        };
        let prob = self.probability.map_or_else(|| "-".to_string(), |p| p.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.doc_id,
            self.sentence_index,
            self.clue_name,
            self.span.start,
            self.span.len(),
            opt(self.target_span),
            opt(self.source_span),
            self.marker_surface,
            prob
        )
    }

    pub fn judgment_template(&self) -> Option<String> {
        self.first_unit.map(|u| {
            format!("{}\t{}\t{}\t{}\tnone", self.clue_name, self.doc_id, self.sentence_index, u)
        })
    }
}

pub fn parse_standoff(text: &str) -> Result<Vec<AnnotationRecord>, StandoffError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let syntax = |message: String| StandoffError::Syntax { line, message };
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() != 11 {
            return Err(syntax(format!("expected 11 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(format!("bad number `{s}`")));
        let span = |start: &str, len: &str| -> Result<Option<Span>, StandoffError> {
            match (start, len) {
                ("-", "-") => Ok(None),
                _ => {
                    let start = num(start)?;
                    Ok(Some(Span::new(start, start + num(len)?)))
                }
            }
        };
        let start = num(f[3])?;
        out.push(AnnotationRecord {
            doc_id: f[0].to_string(),
            sentence_index: num(f[1])?,
            clue_name: f[2].to_string(),
            first_unit: None,
            span: Span::new(start, start + num(f[4])?),
            target_span: span(f[5], f[6])?,
            source_span: span(f[7], f[8])?,
            marker_surface: f[9].to_string(),
            probability: match f[10] {
                "-" => None,
                p => Some(p.parse().map_err(syntax)?),
            },
        });
    }
    Ok(out)
}

pub fn write_standoff(records: &[AnnotationRecord]) -> String {
    records.iter().map(|r| r.to_standoff() + "\n").collect()
}

#[derive(Debug, Clone)]
pub struct AnalyzedSentence {
    pub tagged: Vec<TaggedToken>,
    pub units: Vec<Unit>,
    pub matches: Vec<Match>,
}

/// Configured tokenize → tag → chunk → match chain.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub splitter: SentenceSplitter,
    pub lexicon: Lexicon,
    pub rules: Vec<TransformationRule>,
    pub catalog: Catalog,
    pub skip: BTreeSet<SkipClass>,
    pub mode: MatchMode,
}

impl Pipeline {
    pub fn new(catalog: Catalog, lexicon: Lexicon, rules: Vec<TransformationRule>) -> Self {
        Pipeline {
            splitter: SentenceSplitter::default(),
            lexicon,
            rules,
            skip: catalog.skip.clone(),
            catalog,
            mode: MatchMode::Canonical,
        }
    }

    pub fn with_skip(mut self, skip: BTreeSet<SkipClass>) -> Self {
        self.skip = skip;
        self
    }

    pub fn with_mode(mut self, mode: MatchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn analyze_tagged(&self, tagged: Vec<TaggedToken>) -> AnalyzedSentence {
        let units = chunk(&tagged);
        let matches = match_all_with(&self.catalog, &units, &self.skip, self.mode);
        AnalyzedSentence { tagged, units, matches }
    }

    pub fn analyze(&self, text: &str) -> (Document, Vec<AnalyzedSentence>) {
        let document = Document::parse(text, &self.splitter);
        let sentences = document
            .sentences
            .iter()
            .map(|s| self.analyze_tagged(tag(&s.tokens, &self.lexicon, &self.rules)))
            .collect();
        (document, sentences)
    }

    pub fn annotate_text(&self, doc_id: &str, text: &str) -> Vec<AnnotationRecord> {
        let (_, sentences) = self.analyze(text);
        self.records(doc_id, &sentences)
    }

    /// Annotates already tagged sentences (pre-tagged input).
    pub fn annotate_tagged(&self, doc_id: &str, sentences: Vec<Vec<TaggedToken>>) -> Vec<AnnotationRecord> {
        let analyzed: Vec<_> = sentences.into_iter().map(|s| self.analyze_tagged(s)).collect();
        self.records(doc_id, &analyzed)
    }

    pub fn records(&self, doc_id: &str, sentences: &[AnalyzedSentence]) -> Vec<AnnotationRecord> {
        let mut out = Vec::new();
        for (sentence_index, s) in sentences.iter().enumerate() {
            for m in &s.matches {
                let (first, last) = m.unit_range;
                out.push(AnnotationRecord {
                    doc_id: doc_id.to_string(),
                    sentence_index,
                    clue_name: m.clue_name.clone(),
                    first_unit: Some(first),
                    span: s.units[first].span().cover(&s.units[last].span()),
                    target_span: m.target_span,
                    source_span: m.source_span,
                    marker_surface: m.marker_surface.clone(),
                    probability: self.catalog.clue(&m.clue_name).and_then(nonliteral_probability),
                });
            }
        }
        sort_records(&mut out);
        out
    }
}

pub fn sort_records(records: &mut [AnnotationRecord]) {
    records.sort_by(|a, b| {
        (&a.doc_id, a.sentence_index, a.span.start).cmp(&(&b.doc_id, b.sentence_index, b.span.start))
    });
}

#[derive(Debug)]
pub struct FileFailure {
    pub path: PathBuf,
    pub error: std::io::Error,
}

impl fmt::Display for FileFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.error)
    }
}

#[derive(Debug, Default)]
pub struct CorpusAnnotation {
    pub records: Vec<AnnotationRecord>,
    pub failures: Vec<FileFailure>,
}

/// Annotates each file; the document id is the path as given. Unreadable
/// files are reported in `failures` and do not stop the others.
pub fn annotate_corpus<P: AsRef<Path> + Sync>(paths: &[P], pipeline: &Pipeline, parallel: bool) -> CorpusAnnotation {
    let run = |path: &P| -> Result<Vec<AnnotationRecord>, FileFailure> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|error| FileFailure { path: path.to_path_buf(), error })?;
        Ok(pipeline.annotate_text(&path.display().to_string(), &text))
    };
    let results: Vec<_> = if parallel {
        paths.par_iter().map(run).collect()
    } else {
        paths.iter().map(run).collect()
    };
    let mut out = CorpusAnnotation::default();
    for r in results {
        match r {
            Ok(records) => out.records.extend(records),
            Err(f) => out.failures.push(f),
        }
    }
    sort_records(&mut out.records);
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MarkError {
    #[error("span {span} out of bounds for text of {len} characters")]
    OutOfBounds { span: Span, len: usize },
    #[error("clue name `{0}` contains a mark delimiter")]
    DelimiterInName(String),
    #[error("invalid mark delimiters")]
    BadStyle,
    #[error("malformed mark at character {0}")]
    Malformed(usize),
}

/// Mark delimiters. Marks look like `⟪clue NAME target⟫Peter⟪/⟫`. A literal
/// `open` in the text is written twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkStyle {
    pub open: String,
    pub close: String,
}

impl Default for MarkStyle {
    fn default() -> Self {
        MarkStyle { open: "⟪".into(), close: "⟫".into() }
    }
}

impl MarkStyle {
    fn check(&self) -> Result<(), MarkError> {
        if self.open.is_empty()
            || self.close.is_empty()
            || self.open.contains(&self.close)
            || self.close.contains(&self.open)
            || self_overlapping(&self.open)
        {
            return Err(MarkError::BadStyle);
        }
        Ok(())
    }
}

// "aba": an escaped run of such a delimiter could not be split back apart
fn self_overlapping(delimiter: &str) -> bool {
    let chars: Vec<char> = delimiter.chars().collect();
    (1..chars.len()).any(|k| chars[..k] == chars[chars.len() - k..])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inline {
    pub text: String,
    /// Indices of records left out because their role spans overlap an
    /// earlier record's.
    pub skipped: Vec<usize>,
}

pub fn mark_inline(text: &str, records: &[AnnotationRecord], style: &MarkStyle) -> Result<Inline, MarkError> {
    style.check()?;
    let index = CharIndex::new(text);
    let len = index.char_len();
    let mut accepted: Vec<(Span, &str, &'static str)> = Vec::new();
    let mut skipped = Vec::new();
    for (i, r) in records.iter().enumerate() {
        if r.clue_name.contains(&style.open) || r.clue_name.contains(&style.close) {
            return Err(MarkError::DelimiterInName(r.clue_name.clone()));
        }
        let roles: Vec<(Span, &'static str)> = [(r.target_span, "target"), (r.source_span, "source")]
            .into_iter()
            .filter_map(|(s, role)| s.map(|s| (s, role)))
            .collect();
        for (s, _) in &roles {
            if s.end > len {
                return Err(MarkError::OutOfBounds { span: *s, len });
            }
        }
        let clash = roles.iter().enumerate().any(|(k, (s, _))| {
            roles[..k].iter().any(|(o, _)| o.overlaps(s)) || accepted.iter().any(|(o, _, _)| o.overlaps(s))
        });
        if clash {
            skipped.push(i);
            continue;
        }
        accepted.extend(roles.into_iter().map(|(s, role)| (s, r.clue_name.as_str(), role)));
    }
    accepted.sort_by_key(|(s, _, _)| (s.start, s.end));

    let mut out = String::with_capacity(text.len() + accepted.len() * 24);
    let mut next = accepted.iter().peekable();
    let mut open_until: Option<usize> = None;
    for (pos, c) in text.chars().chain(std::iter::once('\0')).enumerate() {
        if open_until == Some(pos) {
            out.push_str(&style.open);
            out.push('/');
            out.push_str(&style.close);
            open_until = None;
        }
        // zero-length spans never occur for unit spans, but stay well-formed
        while let Some((span, name, role)) = next.peek() {
            if span.start != pos {
                break;
            }
            out.push_str(&format!("{}clue {name} {role}{}", style.open, style.close));
            if span.is_empty() {
                out.push_str(&format!("{}/{}", style.open, style.close));
            } else {
                open_until = Some(span.end);
            }
            next.next();
        }
        if pos == len {
            break;
        }
        if text[index.byte_offset(pos).unwrap()..].starts_with(&style.open) {
            out.push_str(&style.open);
        }
        out.push(c);
    }
    Ok(Inline { text: out, skipped })
}

/// Removes marks and unescapes doubled open delimiters.
pub fn strip_marks(marked: &str, style: &MarkStyle) -> Result<String, MarkError> {
    style.check()?;
    let mut out = String::with_capacity(marked.len());
    let mut rest = marked;
    let mut consumed = 0;
    while let Some(at) = rest.find(&style.open) {
        out.push_str(&rest[..at]);
        let after = &rest[at + style.open.len()..];
        if let Some(tail) = after.strip_prefix(&style.open) {
            out.push_str(&style.open);
            rest = tail;
        } else {
            let end = after.find(&style.close).ok_or(MarkError::Malformed(consumed + at))?;
            let tag = &after[..end];
            if tag != "/" && !tag.starts_with("clue ") {
                return Err(MarkError::Malformed(consumed + at));
            }
            rest = &after[end + style.close.len()..];
        }
        consumed = marked.len() - rest.len();
    }
    out.push_str(rest);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueStats {
    pub clue_name: String,
    pub documents: usize,
    pub occurrences: usize,
    /// Over documents where the clue occurs at least once.
    pub min_per_document: usize,
    pub max_per_document: usize,
}

/// Per-clue counts, sorted by clue name.
pub fn corpus_stats(records: &[AnnotationRecord]) -> Vec<ClueStats> {
    let mut per_clue: BTreeMap<&str, HashMap<&str, usize>> = BTreeMap::new();
    for r in records {
        *per_clue.entry(&r.clue_name).or_default().entry(&r.doc_id).or_default() += 1;
    }
    per_clue
        .into_iter()
        .map(|(clue, docs)| ClueStats {
            clue_name: clue.to_string(),
            documents: docs.len(),
            occurrences: docs.values().sum(),
            min_per_document: docs.values().copied().min().unwrap_or(0),
            max_per_document: docs.values().copied().max().unwrap_or(0),
        })
        .collect()
}

/// Combines tables computed over record streams with disjoint document sets.
pub fn merge_stats(a: &[ClueStats], b: &[ClueStats]) -> Vec<ClueStats> {
    let mut merged: BTreeMap<String, ClueStats> = BTreeMap::new();
    for s in a.iter().chain(b) {
        merged
            .entry(s.clue_name.clone())
            .and_modify(|m| {
                m.documents += s.documents;
                m.occurrences += s.occurrences;
                m.min_per_document = m.min_per_document.min(s.min_per_document);
                m.max_per_document = m.max_per_document.max(s.max_per_document);
            })
            .or_insert_with(|| s.clone());
    }
    merged.into_values().collect()
}
