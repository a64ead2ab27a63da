//! Aligning clue patterns against chunked sentences.
//!
//! An alignment maps the SSP elements, in order, onto increasing unit
//! positions. Optional elements may stay unbound, and between two bound
//! units only units in the skip set may be stepped over. The lexical marker
//! must sit on the unit bound to the marker slot (its head, for groups), so
//! the marker element is bound even when it is written as optional.
//!
//! The canonical result per clue is found by a leftmost scan: at the first
//! start position that admits any alignment, the alignment binding the most
//! optional elements wins, then the one ending earliest, then the smallest
//! binding vector (unbound before bound, lower units first). Scanning resumes
//! after the chosen alignment, so matches of one clue never overlap.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};

use crate::catalog::{Catalog, ClueDefinition, SkipClass, Slot, SlotCategory};
use crate::chunker::{Unit, UnitKind};
use crate::tagger::Category;
use crate::text::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub clue_name: String,
    /// First and last bound unit, inclusive.
    pub unit_range: (usize, usize),
    pub bindings: BTreeMap<Slot, usize>,
    /// Bound unit per SSP element, `None` for skipped optionals.
    pub alignment: Alignment,
    pub marker_unit: usize,
    pub marker_surface: String,
    pub target_span: Option<Span>,
    pub source_span: Option<Span>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Leftmost, preferred, non-overlapping.
    #[default]
    Canonical,
    /// Every alignment, overlapping or not.
    AllCandidates,
}

/// Whether a unit may fill an element of the given category.
pub fn compatible(category: SlotCategory, unit: &Unit) -> bool {
    let tok_of = |c: Category| unit.kind == UnitKind::Tok && unit.category() == c;
    match category {
        SlotCategory::Gn => unit.kind == UnitKind::Gn,
        SlotCategory::Gv => unit.kind == UnitKind::Gv,
        SlotCategory::V => unit.kind == UnitKind::Gv || tok_of(Category::V),
        SlotCategory::Adj => tok_of(Category::Adj),
        SlotCategory::Adv => tok_of(Category::Adv),
        SlotCategory::Prep => tok_of(Category::Prep),
        SlotCategory::Det => tok_of(Category::Det),
        SlotCategory::Pro => tok_of(Category::Pro),
        SlotCategory::Conj => tok_of(Category::Conj),
        SlotCategory::Tok => unit.kind == UnitKind::Tok,
    }
}

pub fn skippable(unit: &Unit, skip: &BTreeSet<SkipClass>) -> bool {
    skip.contains(&SkipClass::Kind(unit.kind))
        || (unit.kind == UnitKind::Tok && skip.contains(&SkipClass::Category(unit.category())))
}

/// Preference order between two alignments of one clue that start at the
/// same unit; `Less` means `a` is preferred.
pub fn prefer(a: &[Option<usize>], b: &[Option<usize>], optional: &[bool]) -> Ordering {
    let key = |al: &[Option<usize>]| {
        let bound_optionals = al.iter().zip(optional).filter(|(u, o)| **o && u.is_some()).count();
        let last = al.iter().flatten().max().copied();
        (Reverse(bound_optionals), last)
    };
    key(a).cmp(&key(b)).then_with(|| a.cmp(b))
}

/// Unit bound to each SSP element, `None` for an omitted optional.
pub type Alignment = Vec<Option<usize>>;

struct Aligner<'a> {
    clue: &'a ClueDefinition,
    units: &'a [Unit],
    skip: &'a BTreeSet<SkipClass>,
    optional: Vec<bool>,
    marker_element: usize,
    // (element, next unit) -> best suffix alignment
    memo: Vec<Vec<Option<Option<Alignment>>>>,
}

impl<'a> Aligner<'a> {
    fn new(clue: &'a ClueDefinition, units: &'a [Unit], skip: &'a BTreeSet<SkipClass>) -> Option<Self> {
        let marker_element = clue.element_index(clue.lm.slot)?;
        Some(Aligner {
            clue,
            units,
            skip,
            optional: clue.ssp.iter().map(|e| e.optional).collect(),
            marker_element,
            memo: vec![vec![None; units.len() + 1]; clue.ssp.len() + 1],
        })
    }

    fn fits(&self, element: usize, unit: usize) -> bool {
        let u = &self.units[unit];
        compatible(self.clue.ssp[element].category, u)
            && (element != self.marker_element || self.clue.lm.accepts(&u.head().lemma))
    }

    // an optional marker element still has to carry the marker
    fn may_omit(&self, element: usize) -> bool {
        self.optional[element] && element != self.marker_element
    }

    /// Positions where the next element may bind when the next free unit is
    /// `from`: `from` itself and every unit reachable across skippable ones.
    fn reachable(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        let mut open = true;
        (from..self.units.len()).take_while(move |&k| {
            let ok = open;
            open = skippable(&self.units[k], self.skip);
            ok
        })
    }

    fn suffix_key(&self, element: usize, suffix: &[Option<usize>], floor: Option<usize>) -> (Reverse<usize>, Option<usize>) {
        let bound_optionals = suffix
            .iter()
            .zip(&self.optional[element..])
            .filter(|(u, o)| **o && u.is_some())
            .count();
        let last = suffix.iter().flatten().max().copied().or(floor);
        (Reverse(bound_optionals), last)
    }

    /// Best alignment of elements `element..` with the next binding at or
    /// after `from`.
    fn best_suffix(&mut self, element: usize, from: usize) -> Option<Alignment> {
        if element == self.clue.ssp.len() {
            return Some(Vec::new());
        }
        if let Some(cached) = &self.memo[element][from] {
            return cached.clone();
        }
        let floor = from.checked_sub(1);
        let mut best: Option<Alignment> = None;
        let mut consider = |this: &Self, cand: Alignment| {
            let better = best.as_ref().is_none_or(|cur| {
                let a = this.suffix_key(element, &cand, floor);
                let b = this.suffix_key(element, cur, floor);
                a.cmp(&b).then_with(|| cand.cmp(cur)) == Ordering::Less
            });
            if better {
                best = Some(cand);
            }
        };
        if self.may_omit(element) {
            if let Some(rest) = self.best_suffix(element + 1, from) {
                let mut cand = vec![None];
                cand.extend(rest);
                consider(self, cand);
            }
        }
        let positions: Vec<usize> = self.reachable(from).collect();
        for k in positions {
            if !self.fits(element, k) {
                continue;
            }
            if let Some(rest) = self.best_suffix(element + 1, k + 1) {
                let mut cand = vec![Some(k)];
                cand.extend(rest);
                consider(self, cand);
            }
        }
        self.memo[element][from] = Some(best.clone());
        best
    }

    /// Best alignment whose first bound unit is `start`.
    fn best_at(&mut self, start: usize) -> Option<Alignment> {
        let mut best: Option<Alignment> = None;
        for first in 0..self.clue.ssp.len() {
            if self.fits(first, start) {
                if let Some(rest) = self.best_suffix(first + 1, start + 1) {
                    let mut cand = vec![None; first];
                    cand.push(Some(start));
                    cand.extend(rest);
                    if best.as_ref().is_none_or(|b| prefer(&cand, b, &self.optional) == Ordering::Less) {
                        best = Some(cand);
                    }
                }
            }
            if !self.may_omit(first) {
                break;
            }
        }
        best
    }

    fn all_at(&self, start: usize) -> Vec<Alignment> {
        let mut out = Vec::new();
        for first in 0..self.clue.ssp.len() {
            if self.fits(first, start) {
                let mut prefix = vec![None; first];
                prefix.push(Some(start));
                self.extend_all(first + 1, start + 1, &mut prefix, &mut out);
            }
            if !self.may_omit(first) {
                break;
            }
        }
        out.sort_by(|a, b| prefer(a, b, &self.optional));
        out
    }

    fn extend_all(&self, element: usize, from: usize, prefix: &mut Alignment, out: &mut Vec<Alignment>) {
        if element == self.clue.ssp.len() {
            out.push(prefix.clone());
            return;
        }
        if self.may_omit(element) {
            prefix.push(None);
            self.extend_all(element + 1, from, prefix, out);
            prefix.pop();
        }
        for k in self.reachable(from).collect::<Vec<_>>() {
            if self.fits(element, k) {
                prefix.push(Some(k));
                self.extend_all(element + 1, k + 1, prefix, out);
                prefix.pop();
            }
        }
    }

    fn to_match(&self, alignment: Alignment) -> Match {
        let bound: Vec<usize> = alignment.iter().flatten().copied().collect();
        let unit_range = (bound[0], *bound.last().unwrap());
        let bindings = self
            .clue
            .ssp
            .iter()
            .zip(&alignment)
            .filter_map(|(e, u)| u.map(|u| (e.slot(), u)))
            .collect();
        let marker_unit = alignment[self.marker_element].expect("marker element is always bound");
        let role_span = |slot: Option<Slot>| {
            let element = self.clue.element_index(slot?)?;
            alignment[element].map(|u| self.units[u].span())
        };
        Match {
            clue_name: self.clue.name.clone(),
            unit_range,
            bindings,
            marker_unit,
            marker_surface: self.units[marker_unit].head().token.surface.clone(),
            target_span: role_span(self.clue.target_slot),
            source_span: role_span(self.clue.source_slot),
            alignment,
        }
    }
}

/// Canonical matches of one clue.
pub fn match_clue(clue: &ClueDefinition, units: &[Unit], skip: &BTreeSet<SkipClass>) -> Vec<Match> {
    match_clue_with(clue, units, skip, MatchMode::Canonical)
}

pub fn match_clue_with(
    clue: &ClueDefinition,
    units: &[Unit],
    skip: &BTreeSet<SkipClass>,
    mode: MatchMode,
) -> Vec<Match> {
    let Some(mut aligner) = Aligner::new(clue, units, skip) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    match mode {
        MatchMode::Canonical => {
            let mut start = 0;
            while start < units.len() {
                match aligner.best_at(start) {
                    Some(alignment) => {
                        let m = aligner.to_match(alignment);
                        start = m.unit_range.1 + 1;
                        out.push(m);
                    }
                    None => start += 1,
                }
            }
        }
        MatchMode::AllCandidates => {
            for start in 0..units.len() {
                for alignment in aligner.all_at(start) {
                    out.push(aligner.to_match(alignment));
                }
            }
        }
    }
    out
}

/// Matches of every clue, ordered by first unit and then catalog order.
pub fn match_all(catalog: &Catalog, units: &[Unit]) -> Vec<Match> {
    match_all_with(catalog, units, &catalog.skip, MatchMode::Canonical)
}

pub fn match_all_with(
    catalog: &Catalog,
    units: &[Unit],
    skip: &BTreeSet<SkipClass>,
    mode: MatchMode,
) -> Vec<Match> {
    let mut out: Vec<Match> = catalog
        .clues
        .iter()
        .flat_map(|clue| match_clue_with(clue, units, skip, mode))
        .collect();
    out.sort_by_key(|m| m.unit_range.0);
    out
}
