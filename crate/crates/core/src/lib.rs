//! Detection of textual clues of metaphor and analogy.
//!
//! Text flows through [`text`] (sentences and tokens), [`tagger`]
//! (part of speech with gender and number), [`chunker`] (nominal and verbal
//! groups) and [`matcher`], which aligns the surface patterns of a
//! [`catalog`] of clues and binds metaphor source and target. [`relevance`]
//! turns judged occurrences into per-clue probabilities and [`annotate`]
//! ties the stages together over whole corpora.

pub mod annotate;
pub mod catalog;
pub mod chunker;
pub mod matcher;
pub mod relevance;
pub mod synthetic;
pub mod tagger;
pub mod text;

pub use annotate::{
    annotate_corpus, corpus_stats, mark_inline, strip_marks, AnnotationRecord, ClueStats, MarkStyle,
    Pipeline,
};
pub use catalog::{
    parse_catalog, serialize_catalog, validate_clue, Catalog, ClueDefinition, ClueType, Diagnostic,
    MarkerConstraint, PatternElement, SkipClass, Slot, SlotCategory,
};
pub use chunker::{chunk, Unit, UnitKind};
pub use matcher::{match_all, match_clue, Match, MatchMode};
pub use relevance::{compute_relevance, nonliteral_probability, Judgment, Label, Ratio, RelevanceRecord};
pub use tagger::{tag, Category, Lexicon, PosTag, TaggedToken, TransformationRule};
pub use text::{split_sentences, tokenize, Document, SentenceSplitter, Span, Token, TokenKind};
