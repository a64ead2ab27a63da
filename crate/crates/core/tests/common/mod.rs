//! Test-only helpers: exhaustive matcher oracle and random fixtures.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use stk_core::catalog::{
    default_skip, parse_catalog, serialize_catalog, Catalog, ClueDefinition, ClueType, MarkerConstraint, PatternElement,
    SkipClass, SlotCategory,
};
use stk_core::relevance::{compute_relevance, parse_judgments, Judgment, Label, RelevanceRecord};
use stk_core::chunker::{Unit, UnitKind};
use stk_core::tagger::{Category, PosTag, TaggedToken};
use stk_core::text::{Span, Token, TokenKind};

pub const LEMMAS: &[&str] = &["pareil", "comme", "tour", "x"];

fn unit_accepts(category: SlotCategory, unit: &Unit) -> bool {
    let head = unit.tokens[unit.head_index].tag.category();
    match (category, unit.kind) {
        (SlotCategory::Gn, UnitKind::Gn) | (SlotCategory::Gv, UnitKind::Gv) => true,
        (SlotCategory::V, UnitKind::Gv) => true,
        (SlotCategory::Tok, UnitKind::Tok) => true,
        (_, UnitKind::Tok) => {
            let wanted = match category {
                SlotCategory::V => Category::V,
                SlotCategory::Adj => Category::Adj,
                SlotCategory::Adv => Category::Adv,
                SlotCategory::Prep => Category::Prep,
                SlotCategory::Det => Category::Det,
                SlotCategory::Pro => Category::Pro,
                SlotCategory::Conj => Category::Conj,
                _ => return false,
            };
            head == wanted
        }
        _ => false,
    }
}

fn can_skip(unit: &Unit, skip: &BTreeSet<SkipClass>) -> bool {
    let head = unit.tokens[unit.head_index].tag.category();
    skip.iter().any(|s| match s {
        SkipClass::Kind(k) => *k == unit.kind,
        SkipClass::Category(c) => unit.kind == UnitKind::Tok && *c == head,
    })
}

/// Every valid alignment: each subset of optional elements, each strictly
/// increasing placement of the present ones, filtered by compatibility,
/// marker and gap rules.
pub fn all_alignments(clue: &ClueDefinition, units: &[Unit], skip: &BTreeSet<SkipClass>) -> Vec<Vec<Option<usize>>> {
    let m = clue.ssp.len();
    let optional: Vec<usize> = (0..m).filter(|&i| clue.ssp[i].optional).collect();
    let marker = clue.ssp.iter().position(|e| e.labeled && e.slot() == clue.lm.slot).unwrap();
    let mut out = Vec::new();
    for mask in 0..(1u32 << optional.len()) {
        let present: Vec<usize> = (0..m)
            .filter(|i| match optional.iter().position(|o| o == i) {
                Some(bit) => mask & (1 << bit) != 0,
                None => true,
            })
            .collect();
        if present.is_empty() {
            continue;
        }
        let mut placement = Vec::new();
        place(&present, 0, units.len(), &mut placement, &mut |pos| {
            let ok_kinds = present.iter().zip(pos).all(|(&e, &u)| unit_accepts(clue.ssp[e].category, &units[u]));
            let ok_gaps = pos.windows(2).all(|w| (w[0] + 1..w[1]).all(|g| can_skip(&units[g], skip)));
            let marker_pos = present.iter().position(|&e| e == marker);
            let ok_marker = marker_pos.is_some_and(|p| {
                let u = &units[pos[p]];
                clue.lm.lexemes.contains(&u.tokens[u.head_index].lemma.to_lowercase())
            });
            if ok_kinds && ok_gaps && ok_marker {
                let mut al = vec![None; m];
                for (&e, &u) in present.iter().zip(pos) {
                    al[e] = Some(u);
                }
                out.push(al);
            }
        });
    }
    out
}

fn place(present: &[usize], from: usize, n: usize, acc: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if acc.len() == present.len() {
        visit(acc);
        return;
    }
    for u in from..n {
        acc.push(u);
        place(present, u + 1, n, acc, visit);
        acc.pop();
    }
}

fn first(al: &[Option<usize>]) -> usize {
    al.iter().flatten().copied().min().unwrap()
}

fn last(al: &[Option<usize>]) -> usize {
    al.iter().flatten().copied().max().unwrap()
}

/// Selection rule applied to the enumerated set: leftmost start, then most
/// optional elements bound, then shortest range, then smallest binding
/// vector; scanning restarts after the chosen range.
pub fn oracle_matches(clue: &ClueDefinition, units: &[Unit], skip: &BTreeSet<SkipClass>) -> Vec<Vec<Option<usize>>> {
    let cands = all_alignments(clue, units, skip);
    let bound_optionals =
        |al: &Vec<Option<usize>>| clue.ssp.iter().zip(al).filter(|(e, u)| e.optional && u.is_some()).count();
    let mut chosen = Vec::new();
    let mut resume = 0;
    loop {
        let pool: Vec<&Vec<Option<usize>>> = cands.iter().filter(|a| first(a) >= resume).collect();
        let Some(start) = pool.iter().map(|a| first(a)).min() else { break };
        let mut best: Option<&Vec<Option<usize>>> = None;
        for a in pool.into_iter().filter(|a| first(a) == start) {
            best = match best {
                None => Some(a),
                Some(b) => {
                    let ka = (usize::MAX - bound_optionals(a), last(a), a.clone());
                    let kb = (usize::MAX - bound_optionals(b), last(b), b.clone());
                    if ka < kb { Some(a) } else { Some(b) }
                }
            };
        }
        let best = best.unwrap();
        resume = last(best) + 1;
        chosen.push(best.clone());
    }
    chosen
}

fn token(surface: &str, category: Category, offset: &mut usize) -> TaggedToken {
    let len = surface.chars().count();
    let t = TaggedToken {
        token: Token {
            surface: surface.to_string(),
            span: Span::new(*offset, *offset + len),
            preceding_gap: " ".into(),
            kind: if category == Category::Punct { TokenKind::Punctuation } else { TokenKind::Word },
        },
        tag: PosTag::bare(category),
        lemma: surface.to_string(),
    };
    *offset += len + 1;
    t
}

#[derive(Debug, Clone)]
pub struct UnitShape {
    pub kind: UnitKind,
    pub category: Category,
    pub lemma: &'static str,
}

pub fn build_units(shapes: &[UnitShape]) -> Vec<Unit> {
    let mut offset = 0;
    shapes
        .iter()
        .map(|s| match s.kind {
            UnitKind::Gn => Unit {
                kind: UnitKind::Gn,
                tokens: vec![token("le", Category::Det, &mut offset), token(s.lemma, Category::N, &mut offset)],
                head_index: 1,
            },
            UnitKind::Gv => Unit {
                kind: UnitKind::Gv,
                tokens: vec![token(s.lemma, Category::V, &mut offset)],
                head_index: 0,
            },
            UnitKind::Tok => Unit { kind: UnitKind::Tok, tokens: vec![token(s.lemma, s.category, &mut offset)], head_index: 0 },
        })
        .collect()
}

pub fn unit_shape() -> impl Strategy<Value = UnitShape> {
    let lemma = prop::sample::select(LEMMAS);
    let tok_cat = prop::sample::select(vec![
        Category::Adj,
        Category::Adv,
        Category::Prep,
        Category::Det,
        Category::Pro,
        Category::Conj,
        Category::Punct,
        Category::Other,
    ]);
    prop_oneof![
        2 => lemma.clone().prop_map(|l| UnitShape { kind: UnitKind::Gn, category: Category::N, lemma: l }),
        1 => lemma.clone().prop_map(|l| UnitShape { kind: UnitKind::Gv, category: Category::V, lemma: l }),
        3 => (tok_cat, lemma).prop_map(|(c, l)| UnitShape { kind: UnitKind::Tok, category: c, lemma: l }),
    ]
}

pub fn slot_category() -> impl Strategy<Value = SlotCategory> {
    prop::sample::select(SlotCategory::ALL.to_vec())
}

/// SSP of 1..=6 elements, at most two optional, unique labels, marker on a
/// labeled element.
pub fn clue() -> impl Strategy<Value = ClueDefinition> {
    (prop::collection::vec((slot_category(), any::<bool>(), 0usize..10), 1..=6), any::<prop::sample::Index>(), prop::collection::btree_set(prop::sample::select(LEMMAS), 1..=2))
        .prop_map(|(raw, marker_pick, lexemes)| {
            let mut ssp: Vec<PatternElement> = Vec::new();
            let mut optionals = 0;
            for (i, (category, labeled_hint, roll)) in raw.into_iter().enumerate() {
                let optional = roll < 3 && optionals < 2;
                if optional {
                    optionals += 1;
                }
                // labels are position-based so (category, index) stays
                // unique; unlabeled elements take implicit index 0
                let labeled = labeled_hint
                    || ssp.iter().any(|e: &PatternElement| !e.labeled && e.category == category);
                let index = if labeled { i as u32 + 1 } else { 0 };
                ssp.push(PatternElement { category, index, labeled, optional });
            }
            if ssp.iter().all(|e| !e.labeled) {
                ssp[0].labeled = true;
                ssp[0].index = 1;
            }
            let labeled: Vec<usize> = (0..ssp.len()).filter(|&i| ssp[i].labeled).collect();
            let marker = labeled[marker_pick.index(labeled.len())];
            ClueDefinition {
                clue_type: ClueType::Metaphor,
                name: "rand".into(),
                comment: String::new(),
                lm: MarkerConstraint::new(ssp[marker].slot(), lexemes),
                ssp,
                target_slot: None,
                source_slot: None,
                relevance: None,
            }
        })
}

pub fn skip_set() -> impl Strategy<Value = BTreeSet<SkipClass>> {
    prop::collection::btree_set(
        prop::sample::select(vec![
            SkipClass::Category(Category::Punct),
            SkipClass::Category(Category::Adv),
            SkipClass::Category(Category::Pro),
            SkipClass::Category(Category::Prep),
            SkipClass::Kind(UnitKind::Gn),
            SkipClass::Kind(UnitKind::Tok),
        ]),
        0..=3,
    )
}

fn clue_type() -> impl Strategy<Value = ClueType> {
    prop::sample::select(vec![ClueType::MetaphorAnalogy, ClueType::Metaphor, ClueType::Analogy, ClueType::Context])
}

fn relevance() -> impl Strategy<Value = Option<RelevanceRecord>> {
    prop::option::of((0u64..50, 0u64..20, 0u64..20, 0u64..20, 0u64..50)).prop_map(|r| {
        r.map(|(occ, a, b, c, t)| {
            RelevanceRecord::import([occ, a, b, c, t.min(occ)]).expect("total within occurrences").record
        })
    })
}

/// A full clue: random roles on labeled elements, comment and relevance.
pub fn full_clue() -> impl Strategy<Value = ClueDefinition> {
    (
        clue(),
        clue_type(),
        "([a-z]{1,7}( |, )){0,5}[a-z]{1,7}",
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        0u8..4,
        relevance(),
    )
        .prop_map(|(mut clue, clue_type, comment, t, s, roles, relevance)| {
            let labeled: Vec<_> = clue.ssp.iter().filter(|e| e.labeled).map(|e| e.slot()).collect();
            let target = labeled[t.index(labeled.len())];
            let source = labeled[s.index(labeled.len())];
            clue.clue_type = clue_type;
            clue.comment = if comment.len() % 3 == 0 { String::new() } else { comment };
            clue.target_slot = (roles & 1 == 1).then_some(target);
            clue.source_slot = (roles & 2 == 2 && source != target).then_some(source);
            clue.relevance = relevance;
            clue
        })
}

pub fn catalog() -> impl Strategy<Value = Catalog> {
    (prop::collection::vec(full_clue(), 0..6), prop::option::of(skip_set())).prop_map(|(clues, skip)| Catalog {
        clues: clues
            .into_iter()
            .enumerate()
            .map(|(i, c)| ClueDefinition { name: format!("R.{}.{}", i + 1, c.ssp.len()), ..c })
            .collect(),
        skip: skip.unwrap_or_else(default_skip),
    })
}

pub fn check_catalog_round_trip(catalog: &Catalog) -> Result<(), TestCaseError> {
    prop_assert!(catalog.validate().is_empty(), "{:?}", catalog.validate());
    let text = serialize_catalog(catalog);
    let parsed = parse_catalog(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&parsed, catalog);
    prop_assert_eq!(serialize_catalog(&parsed), text);
    Ok(())
}

pub const CLUE_NAMES: &[&str] = &["A.1", "B.2.2.2", "C.like"];

/// Judgments with unique (clue, document, sentence, unit) keys, in random order.
pub fn judgments() -> impl Strategy<Value = Vec<Judgment>> {
    let label = prop::sample::select(vec![Label::Conventional, Label::New, Label::MetaphoricContext, Label::None]);
    prop::collection::btree_map((0usize..3, 0usize..3, 0usize..5, 0usize..8), label, 0..60)
        .prop_map(|m| {
            m.into_iter()
                .map(|((c, d, s, u), label)| Judgment {
                    clue_name: CLUE_NAMES[c].into(),
                    doc_id: format!("doc{d}"),
                    sentence_index: s,
                    unit_index: u,
                    label,
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

fn tally(judgments: &[Judgment], clue: &str) -> [u64; 5] {
    let count = |l: Label| judgments.iter().filter(|j| j.clue_name == clue && j.label == l).count() as u64;
    let occurrences = judgments.iter().filter(|j| j.clue_name == clue).count() as u64;
    let (a, b, c) = (count(Label::Conventional), count(Label::New), count(Label::MetaphoricContext));
    [occurrences, a, b, c, a + b + c]
}

/// Counting identities plus invariance under the given reordering.
pub fn check_relevance_identities(judgments: &[Judgment], reordered: &[Judgment]) -> Result<(), TestCaseError> {
    for clue in CLUE_NAMES {
        let record = compute_relevance(judgments, clue).unwrap();
        prop_assert_eq!(record.counts(), tally(judgments, clue));
        prop_assert_eq!(record.total, record.category_sum());
        prop_assert!(record.warnings().is_empty());
        prop_assert_eq!(&compute_relevance(reordered, clue).unwrap(), &record);
    }
    let text: String = judgments.iter().map(|j| j.to_line() + "\n").collect();
    prop_assert_eq!(&parse_judgments(&text).unwrap(), &judgments.to_vec());
    Ok(())
}

/// Splits at the two cut points and checks that merging the parts in either
/// grouping gives the record of the whole.
pub fn check_merge_associativity(judgments: &[Judgment], cut_a: usize, cut_b: usize) -> Result<(), TestCaseError> {
    let (lo, hi) = (cut_a.min(cut_b).min(judgments.len()), cut_a.max(cut_b).min(judgments.len()));
    let parts = [&judgments[..lo], &judgments[lo..hi], &judgments[hi..]];
    for clue in CLUE_NAMES {
        let [a, b, c] = parts.map(|p| compute_relevance(p, clue).unwrap());
        let whole = compute_relevance(judgments, clue).unwrap();
        let left = a.merge(&b).merge(&c);
        let right = a.merge(&b.merge(&c));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(a + b + c, whole);
        prop_assert_eq!(left.ratio(), whole.ratio());
    }
    Ok(())
}

pub fn judgments_and_permutation() -> impl Strategy<Value = (Vec<Judgment>, Vec<Judgment>)> {
    judgments().prop_flat_map(|j| (Just(j.clone()), Just(j).prop_shuffle()))
}

/// Documents biased toward the characters the splitter and tokenizer care about.
pub fn doc_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        4 => "[a-zA-Zéèàç]{1,8}",
        1 => "[0-9]{1,4}([.,][0-9]{1,2})?",
        2 => prop::sample::select(vec![" ", "  ", "\n", "\n\n", "\t", " \u{a0}"]).prop_map(String::from),
        2 => prop::sample::select(vec![".", "!", "?", ",", ";", "'", "’", "-", "«", "»", "\"", "(", ")", "…", "M.", "etc.", "l'", "qu'"]).prop_map(String::from),
        1 => any::<char>().prop_map(|c| c.to_string()),
    ];
    prop::collection::vec(piece, 0..60).prop_map(|v| v.concat())
}

fn shape_for(category: SlotCategory, lemma: &'static str) -> UnitShape {
    let tok = |c| UnitShape { kind: UnitKind::Tok, category: c, lemma };
    match category {
        SlotCategory::Gn => UnitShape { kind: UnitKind::Gn, category: Category::N, lemma },
        SlotCategory::Gv | SlotCategory::V => UnitShape { kind: UnitKind::Gv, category: Category::V, lemma },
        SlotCategory::Adj => tok(Category::Adj),
        SlotCategory::Adv => tok(Category::Adv),
        SlotCategory::Prep => tok(Category::Prep),
        SlotCategory::Det => tok(Category::Det),
        SlotCategory::Pro => tok(Category::Pro),
        SlotCategory::Conj => tok(Category::Conj),
        SlotCategory::Tok => tok(Category::Punct),
    }
}

/// A sentence built around the clue's pattern with random units around and
/// between the elements, cut to 12 units. Most of these contain a match.
pub fn planted(clue: ClueDefinition) -> impl Strategy<Value = Vec<UnitShape>> {
    let n = clue.ssp.len();
    let lexemes: Vec<String> = clue.lm.lexemes.iter().cloned().collect();
    let fillers = prop::collection::vec(prop::collection::vec(unit_shape(), 0..=2), n + 1);
    let keep = prop::collection::vec(any::<bool>(), n);
    let lemmas = prop::collection::vec(prop::sample::select(LEMMAS), n);
    (fillers, keep, lemmas, any::<prop::sample::Index>()).prop_map(move |(fillers, keep, lemmas, pick)| {
        let mut out = Vec::new();
        for (i, e) in clue.ssp.iter().enumerate() {
            out.extend(fillers[i].iter().cloned());
            let lemma = if e.slot() == clue.lm.slot {
                let chosen = &lexemes[pick.index(lexemes.len())];
                LEMMAS.iter().copied().find(|l| l == chosen).unwrap_or("x")
            } else {
                lemmas[i]
            };
            if !e.optional || keep[i] {
                out.push(shape_for(e.category, lemma));
            }
        }
        out.extend(fillers[n].iter().cloned());
        out.truncate(12);
        out
    })
}

/// Clue, sentence of at most 12 units and skip set; half the sentences are
/// planted around the pattern, half fully random.
pub fn matcher_case() -> impl Strategy<Value = (ClueDefinition, Vec<UnitShape>, BTreeSet<SkipClass>)> {
    (clue(), any::<bool>(), skip_set()).prop_flat_map(|(clue, plant, skip)| {
        let shapes = if plant {
            planted(clue.clone()).boxed()
        } else {
            prop::collection::vec(unit_shape(), 0..=12).boxed()
        };
        (Just(clue), shapes, Just(skip))
    })
}
