//! Lossless sentence splitting and tokenization.
//!
//! All offsets are in characters (Unicode scalar values), not bytes. Every
//! token remembers the separator text that precedes it, so a document can be
//! rebuilt byte-for-byte from its tokens (see [`Document::reassemble`]).

use std::collections::HashSet;
use std::fmt;

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} > end {end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Smallest span covering both.
    pub fn cover(&self, other: &Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
}

impl TokenKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TokenKind::Word => "word",
            TokenKind::Number => "number",
            TokenKind::Punctuation => "punctuation",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub span: Span,
    /// Separator text between the previous token (or the start of the
    /// scanned region) and this token.
    pub preceding_gap: String,
    pub kind: TokenKind,
}

/// Character-offset view over a string, for slicing by [`Span`].
#[derive(Debug, Clone)]
pub struct CharIndex<'a> {
    text: &'a str,
    // byte offset of every char, plus text.len() as sentinel
    offsets: Vec<usize>,
}

impl<'a> CharIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        offsets.push(text.len());
        CharIndex { text, offsets }
    }

    pub fn char_len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Byte offset of a character offset; `None` past the end.
    pub fn byte_offset(&self, char_offset: usize) -> Option<usize> {
        self.offsets.get(char_offset).copied()
    }

    pub fn slice(&self, span: Span) -> Option<&'a str> {
        let start = self.byte_offset(span.start)?;
        let end = self.byte_offset(span.end)?;
        self.text.get(start..end)
    }
}

/// Words directly followed by an apostrophe that are split off as elided
/// articles, pronouns and conjunctions ("l'arbre" -> "l'" + "arbre").
pub const ELISION_PREFIXES: &[&str] = &["l", "d", "j", "n", "s", "c", "qu", "m", "t"];

pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "M.", "MM.", "Mme.", "Mlle.", "Mgr.", "Dr.", "Pr.", "St.", "Ste.", "Mr.", "Mrs.", "Ms.",
    "etc.", "cf.", "ex.", "p.", "pp.", "vol.", "chap.", "env.", "av.", "apr.", "vs.", "e.g.",
    "i.e.", "fig.", "art.", "no.",
];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | '»' | '”' | '’' | ')' | ']')
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

fn is_combining(c: char) -> bool {
    matches!(c as u32,
        0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x1DC0..=0x1DFF | 0x20D0..=0x20FF | 0xFE20..=0xFE2F)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining(c)
}

/// Heuristic sentence splitter: a run of terminators (plus closing quotes or
/// brackets) ends a sentence when followed by end of text or by whitespace
/// and a capital letter, unless the word it ends is a known abbreviation. A
/// blank line always ends a sentence.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        SentenceSplitter::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SentenceSplitter {
            abbreviations: abbreviations.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(word)
    }

    pub fn split(&self, text: &str) -> Vec<Span> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut spans = Vec::new();
        let mut i = 0;
        let mut start: Option<usize> = None;
        // end of the last non-whitespace char seen in the current sentence
        let mut last_content = 0;

        while i < n {
            let c = chars[i];
            if c.is_whitespace() {
                if c == '\n' && start.is_some() && blank_line_follows(&chars, i) {
                    spans.push(Span::new(start.take().unwrap(), last_content));
                }
                i += 1;
                continue;
            }
            if start.is_none() {
                start = Some(i);
            }
            if is_terminator(c) {
                let mut j = i;
                while j < n && is_terminator(chars[j]) {
                    j += 1;
                }
                while j < n && is_closer(chars[j]) {
                    j += 1;
                }
                last_content = j;
                let boundary = if j == n {
                    true
                } else if chars[j].is_whitespace() {
                    let mut k = j;
                    while k < n && chars[k].is_whitespace() {
                        k += 1;
                    }
                    k == n || chars[k].is_uppercase()
                } else {
                    false
                };
                if boundary && !(c == '.' && j == i + 1 && self.ends_abbreviation(&chars, i)) {
                    spans.push(Span::new(start.take().unwrap(), j));
                }
                i = j;
                continue;
            }
            i += 1;
            last_content = i;
        }
        if let Some(s) = start {
            spans.push(Span::new(s, last_content));
        }
        spans
    }

    // `dot` is the index of a period; checks the whitespace-delimited word
    // ending with it.
    fn ends_abbreviation(&self, chars: &[char], dot: usize) -> bool {
        let mut b = dot;
        while b > 0 && !chars[b - 1].is_whitespace() {
            b -= 1;
        }
        let word: String = chars[b..=dot].iter().collect();
        let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
        self.is_abbreviation(word)
    }
}

fn blank_line_follows(chars: &[char], newline: usize) -> bool {
    chars[newline + 1..]
        .iter()
        .take_while(|c| c.is_whitespace())
        .any(|&c| c == '\n')
}

/// Splits with the default abbreviation list.
pub fn split_sentences(text: &str) -> Vec<Span> {
    SentenceSplitter::default().split(text)
}

/// Tokenizes one sentence span of `text`. The first token's gap starts at the
/// beginning of the sentence span.
pub fn tokenize(text: &str, sentence: Span) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    tokenize_chars(&chars, sentence, sentence.start)
}

fn tokenize_chars(chars: &[char], sentence: Span, gap_start: usize) -> Vec<Token> {
    let end = sentence.end.min(chars.len());
    let mut tokens = Vec::new();
    let mut gap_from = gap_start;
    let mut i = sentence.start;
    while i < end {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (j, kind) = if c.is_numeric() {
            (scan_number(chars, i, end), TokenKind::Number)
        } else if is_word_char(c) {
            (scan_word(chars, i, end), TokenKind::Word)
        } else {
            (i + 1, TokenKind::Punctuation)
        };
        tokens.push(Token {
            surface: chars[i..j].iter().collect(),
            span: Span::new(i, j),
            preceding_gap: chars[gap_from..i].iter().collect(),
            kind,
        });
        gap_from = j;
        i = j;
    }
    tokens
}

fn scan_number(chars: &[char], start: usize, end: usize) -> usize {
    let mut j = start + 1;
    while j < end {
        let c = chars[j];
        if c.is_numeric() {
            j += 1;
        } else if matches!(c, '.' | ',') && j + 1 < end && chars[j + 1].is_numeric() {
            j += 2;
        } else {
            break;
        }
    }
    j
}

fn scan_word(chars: &[char], start: usize, end: usize) -> usize {
    let mut j = start + 1;
    while j < end {
        let c = chars[j];
        if is_word_char(c) {
            j += 1;
        } else if is_apostrophe(c) {
            let prefix: String = chars[start..j].iter().collect::<String>().to_lowercase();
            if ELISION_PREFIXES.contains(&prefix.as_str()) {
                return j + 1;
            }
            if j + 1 < end && is_word_char(chars[j + 1]) {
                j += 1;
            } else {
                break;
            }
        } else if c == '-' && j + 1 < end && is_word_char(chars[j + 1]) {
            j += 1;
        } else {
            break;
        }
    }
    j
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub span: Span,
    pub tokens: Vec<Token>,
}

/// A tokenized document. Token gaps chain across sentence boundaries, so
/// the separators between sentences live in the next sentence's first gap
/// and the text after the last token lives in `trailing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub sentences: Vec<Sentence>,
    pub trailing: String,
}

impl Document {
    pub fn parse(text: &str, splitter: &SentenceSplitter) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut gap_start = 0;
        let mut sentences = Vec::new();
        for span in splitter.split(text) {
            let tokens = tokenize_chars(&chars, span, gap_start);
            if let Some(last) = tokens.last() {
                gap_start = last.span.end;
            }
            sentences.push(Sentence { span, tokens });
        }
        Document {
            sentences,
            trailing: chars[gap_start..].iter().collect(),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn reassemble(&self) -> String {
        let mut out = String::new();
        for token in self.tokens() {
            out.push_str(&token.preceding_gap);
            out.push_str(&token.surface);
        }
        out.push_str(&self.trailing);
        out
    }
}
