//! Flat chunking of tagged sentences into nominal groups, verbal groups and
//! free tokens.
//!
//! Greedy, left to right, no recursion:
//!
//! ```text
//! GN  := DET? ADJ* N (ADJ | N)*
//! GV  := ADV* V V*
//! TOK := any other single token
//! ```
//!
//! An adjective only joins a GN when it is contiguous with the noun material,
//! so predicative adjectives ("le projet semble pareil") stay free.

use std::fmt;

use crate::tagger::{Category, TaggedToken};
use crate::text::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitKind {
    Gn,
    Gv,
    Tok,
}

impl UnitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnitKind::Gn => "GN",
            UnitKind::Gv => "GV",
            UnitKind::Tok => "TOK",
        }
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub kind: UnitKind,
    pub tokens: Vec<TaggedToken>,
    pub head_index: usize,
}

impl Unit {
    pub fn head(&self) -> &TaggedToken {
        &self.tokens[self.head_index]
    }

    /// Category of the head token.
    pub fn category(&self) -> Category {
        self.head().category()
    }

    pub fn span(&self) -> Span {
        let first = self.tokens.first().expect("units are non-empty").token.span;
        let last = self.tokens.last().expect("units are non-empty").token.span;
        Span::new(first.start, last.end)
    }

    /// `KIND\thead\tsurface...`
    pub fn to_line(&self) -> String {
        let mut line = format!("{}\t{}", self.kind, self.head().token.surface);
        for t in &self.tokens {
            line.push('\t');
            line.push_str(&t.token.surface);
        }
        line
    }
}

pub fn chunk(tagged: &[TaggedToken]) -> Vec<Unit> {
    let cats: Vec<Category> = tagged.iter().map(TaggedToken::category).collect();
    let mut units = Vec::new();
    let mut i = 0;
    while i < cats.len() {
        let (kind, end, head) = if let Some((end, head)) = scan_gn(&cats, i) {
            (UnitKind::Gn, end, head)
        } else if let Some((end, head)) = scan_gv(&cats, i) {
            (UnitKind::Gv, end, head)
        } else {
            (UnitKind::Tok, i + 1, i)
        };
        units.push(Unit {
            kind,
            tokens: tagged[i..end].to_vec(),
            head_index: head - i,
        });
        i = end;
    }
    units
}

// Both scanners return (exclusive end, absolute head index).
fn scan_gn(cats: &[Category], start: usize) -> Option<(usize, usize)> {
    let mut j = start;
    if cats.get(j) == Some(&Category::Det) {
        j += 1;
    }
    while cats.get(j) == Some(&Category::Adj) {
        j += 1;
    }
    if cats.get(j) != Some(&Category::N) {
        return None;
    }
    let head = j;
    j += 1;
    while matches!(cats.get(j), Some(Category::Adj | Category::N)) {
        j += 1;
    }
    Some((j, head))
}

fn scan_gv(cats: &[Category], start: usize) -> Option<(usize, usize)> {
    let mut j = start;
    while cats.get(j) == Some(&Category::Adv) {
        j += 1;
    }
    if cats.get(j) != Some(&Category::V) {
        return None;
    }
    let head = j;
    j += 1;
    while cats.get(j) == Some(&Category::V) {
        j += 1;
    }
    Some((j, head))
}
