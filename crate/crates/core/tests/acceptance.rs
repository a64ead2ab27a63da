//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use stk_core::annotate::{mark_inline, strip_marks, MarkStyle, Pipeline};
use stk_core::catalog::{parse_catalog, ClueType, DiagnosticKind, Slot, SlotCategory};
use stk_core::matcher::match_clue;
use stk_core::relevance::RelevanceRecord;
use stk_core::tagger::{load_rules, Lexicon};
use stk_core::text::{CharIndex, Document, SentenceSplitter, Span};

use common::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read(name: &str) -> String {
    fs::read_to_string(fixture(name)).unwrap()
}

fn english(catalog: &str) -> Pipeline {
    Pipeline::new(
        parse_catalog(&read(catalog)).unwrap(),
        Lexicon::load(fixture("en.lex")).unwrap(),
        load_rules(fixture("en.rules")).unwrap(),
    )
}

fn french() -> Pipeline {
    Pipeline::new(parse_catalog(&read("b2222.cat")).unwrap(), Lexicon::load(fixture("fr.lex")).unwrap(), Vec::new())
}

fn runner() -> TestRunner {
    let config = Config { failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Draws `n` values and counts those failing `check`.
fn sample<S: Strategy>(strategy: S, n: usize, mut check: impl FnMut(S::Value) -> bool) -> usize {
    let mut runner = runner();
    (0..n)
        .filter(|_| !check(strategy.new_tree(&mut runner).unwrap().current()))
        .count()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn worked_example() -> Outcome {
    let catalog = parse_catalog(&read("b2222.cat")).map_err(|e| e.to_string())?;
    ensure(catalog.clues.len() == 1, "expected one clue")?;
    let clue = &catalog.clues[0];
    ensure(clue.name == "B.2.2.2", "name")?;
    ensure(clue.clue_type == ClueType::MetaphorAnalogy, "type")?;
    let ssp = stk_core::catalog::format_ssp(&clue.ssp);
    ensure(ssp == "GN_0 GN_1 V_1 Adj_0 [prep] GN_2", format!("ssp {ssp}"))?;
    ensure(clue.lm.slot == Slot::new(SlotCategory::Adj, 0), "lm slot")?;
    ensure(clue.lm.lexemes.iter().eq(["pareil"].iter()), "lm lexemes")?;
    ensure(clue.target_slot == Some(Slot::new(SlotCategory::Gn, 1)), "target")?;
    ensure(clue.source_slot == Some(Slot::new(SlotCategory::Gn, 2)), "source")?;
    let record = clue.relevance.as_ref().ok_or("no relevance")?;
    ensure(record.counts() == [28, 3, 2, 12, 15], format!("counts {:?}", record.counts()))?;
    let ratio = record.ratio().ok_or("no ratio")?;
    ensure((ratio.numer(), ratio.denom()) == (15, 28), format!("ratio {ratio}"))?;
    let warnings = catalog.warnings();
    ensure(
        warnings.len() == 1
            && warnings[0].kind == DiagnosticKind::RelevanceSumMismatch
            && warnings[0].message.contains("17")
            && warnings[0].message.contains("15"),
        format!("warnings {warnings:?}"),
    )?;
    ensure(catalog.validate().is_empty(), "validation errors")?;
    ensure(RelevanceRecord::import([28, 3, 2, 12, 15]).unwrap().warnings.len() == 1, "import warning")?;
    Ok(format!("ratio {ratio}, warning: {}", warnings[0].message))
}

fn lion() -> Outcome {
    let text = read("lion.txt");
    let records = english("lion.cat").annotate_text("lion", &text);
    ensure(records.len() == 1, format!("{} matches", records.len()))?;
    let index = CharIndex::new(&text);
    let r = &records[0];
    let role = |s: Option<Span>| s.and_then(|s| index.slice(s)).unwrap_or("-").to_string();
    ensure(r.target_span == Some(Span::new(20, 25)), format!("target {:?}", role(r.target_span)))?;
    ensure(r.source_span == Some(Span::new(60, 66)), format!("source {:?}", role(r.source_span)))?;
    Ok(format!("target {:?} {}, source {:?} {}", role(r.target_span), r.target_span.unwrap(), role(r.source_span), r.source_span.unwrap()))
}

fn subject() -> Outcome {
    let pipeline = english("subject.cat");
    let initial = pipeline.annotate_text("s", &read("subject_initial.txt")).len();
    let marker = pipeline.annotate_text("s", &read("subject_marker.txt")).len();
    ensure((initial, marker) == (0, 1), format!("subject {initial}, marker position {marker}"))?;
    Ok("subject position 0 matches, marker position 1 match".into())
}

fn oracle() -> Outcome {
    const CASES: usize = 2000;
    let mut nonempty = 0;
    let failures = sample(matcher_case(), CASES, |(clue, shapes, skip)| {
        let units = build_units(&shapes);
        let got: Vec<_> = match_clue(&clue, &units, &skip).into_iter().map(|m| m.alignment).collect();
        nonempty += usize::from(!got.is_empty());
        got == oracle_matches(&clue, &units, &skip)
    });
    ensure(failures == 0, format!("{failures} discrepancies in {CASES} cases"))?;
    Ok(format!("0 discrepancies in {CASES} cases ({nonempty} with matches)"))
}

fn round_trips() -> Outcome {
    let splitter = SentenceSplitter::default();
    let text_failures = sample(doc_text(), 500, |text| Document::parse(&text, &splitter).reassemble() == text);
    let catalog_failures = sample(catalog(), 200, |c| {
        let mut runner = runner();
        runner.run(&proptest::strategy::Just(c), |c| check_catalog_round_trip(&c)).is_ok()
    });
    let style = MarkStyle::default();
    let fixtures = [
        ("lion.txt", english("lion.cat")),
        ("subject_marker.txt", english("subject.cat")),
        ("subject_initial.txt", english("subject.cat")),
        ("b2222.txt", french()),
        ("b2222_escapes.txt", french()),
    ];
    let mut mark_failures = 0;
    for (name, pipeline) in &fixtures {
        let text = read(name);
        let records = pipeline.annotate_text(name, &text);
        let ok = mark_inline(&text, &records, &style)
            .and_then(|inline| strip_marks(&inline.text, &style))
            .is_ok_and(|back| back == text);
        mark_failures += usize::from(!ok);
    }
    ensure(
        text_failures + catalog_failures + mark_failures == 0,
        format!("failures: tokenizer {text_failures}/500, catalog {catalog_failures}/200, inline {mark_failures}/{}", fixtures.len()),
    )?;
    Ok(format!("tokenizer 500/500, catalog 200/200, inline {}/{}", fixtures.len(), fixtures.len()))
}

fn relevance() -> Outcome {
    let identity = sample(judgments_and_permutation(), 500, |(j, p)| check_relevance_identities(&j, &p).is_ok());
    let strategy = (judgments(), 0usize..64, 0usize..64);
    let merge = sample(strategy, 500, |(j, a, b)| check_merge_associativity(&j, a, b).is_ok());
    ensure(identity + merge == 0, format!("identity failures {identity}/500, merge failures {merge}/500"))?;
    Ok("sum identity and permutation 500/500, merge associativity 500/500".into())
}

fn throughput() -> Outcome {
    const WORDS: usize = 450_000;
    let text = stk_core::synthetic::corpus(WORDS, 2024);
    let pipeline = Pipeline::new(
        parse_catalog(&read("synthetic.cat")).unwrap(),
        stk_core::synthetic::lexicon(),
        load_rules(fixture("synthetic.rules")).unwrap(),
    );
    let start = Instant::now();
    let records = pipeline.annotate_text("synthetic", &text);
    let elapsed = start.elapsed();
    let summary = format!("{WORDS} words in {:.2}s, {} records", elapsed.as_secs_f64(), records.len());
    ensure(elapsed < Duration::from_secs(60) && !records.is_empty(), summary.clone())?;
    Ok(summary)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("worked example catalog fidelity", worked_example),
        ("lion sentence roles", lion),
        ("subject position negative", subject),
        ("matcher oracle equivalence", oracle),
        ("round trips", round_trips),
        ("relevance identities", relevance),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", n + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
