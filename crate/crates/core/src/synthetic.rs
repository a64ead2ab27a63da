//! Seeded synthetic French-like corpora for throughput tests and benches.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::tagger::{Lexicon, PosTag};

const DETS: &[(&str, &str)] = &[("le", "DET:m:s"), ("la", "DET:f:s"), ("un", "DET:m:s"), ("une", "DET:f:s"), ("les", "DET:p"), ("ce", "DET:m:s")];
const NOUNS: &[&str] = &[
    "projet", "tour", "phare", "arbre", "chien", "maison", "ville", "rivière", "idée", "système",
    "réseau", "machine", "jardin", "montagne", "lion", "métaphore", "élève", "cours", "mémoire", "fleuve",
];
const VERBS: &[(&str, &str)] = &[
    ("semble", "sembler"), ("reste", "rester"), ("devient", "devenir"), ("paraît", "paraître"),
    ("mange", "manger"), ("traverse", "traverser"), ("explique", "expliquer"), ("est", "être"),
];
const ADJS: &[&str] = &["pareil", "semblable", "grand", "rapide", "ancien", "immense", "clair", "froid"];
const ADVS: &[&str] = &["souvent", "vraiment", "très", "hier"];
const PREPS: &[&str] = &["à", "de", "comme", "sur", "dans", "avec"];

/// Lexicon covering every word the generator emits.
pub fn lexicon() -> Lexicon {
    let mut lex = Lexicon::new();
    let t = |s: &str| s.parse::<PosTag>().expect("static tag");
    for (d, tag) in DETS {
        lex.insert(d, t(tag), d);
    }
    for n in NOUNS {
        lex.insert(n, t("N:s"), n);
    }
    for (v, lemma) in VERBS {
        lex.insert(v, t("V"), lemma);
    }
    for a in ADJS {
        lex.insert(a, t("ADJ:s"), a);
    }
    for a in ADVS {
        lex.insert(a, t("ADV"), a);
    }
    for p in PREPS {
        lex.insert(p, t("PREP"), p);
    }
    lex.insert("il", t("PRO:m:s"), "il");
    lex.insert("et", t("CONJ"), "et");
    lex.add_suffix_rule("ment", t("ADV"));
    lex
}

fn pick<'a>(rng: &mut StdRng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().expect("non-empty")
}

fn group(rng: &mut StdRng, out: &mut Vec<String>) {
    out.push(DETS.choose(rng).unwrap().0.to_string());
    if rng.gen_bool(0.2) {
        out.push(pick(rng, ADJS).to_string());
    }
    out.push(pick(rng, NOUNS).to_string());
}

/// About `words` words of text, split into paragraphs of sentences.
pub fn corpus(words: usize, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut text = String::new();
    let mut count = 0;
    let mut sentences_in_paragraph = 0;
    while count < words {
        let mut w: Vec<String> = Vec::new();
        match rng.gen_range(0..4) {
            // ce projet , la tour semble pareil à un phare .
            0 => {
                group(&mut rng, &mut w);
                w.push(",".into());
                group(&mut rng, &mut w);
                w.push(VERBS.choose(&mut rng).unwrap().0.into());
                w.push(pick(&mut rng, ADJS).into());
                if rng.gen_bool(0.7) {
                    w.push(pick(&mut rng, PREPS).into());
                }
                group(&mut rng, &mut w);
            }
            // le chien mange souvent comme un lion .
            1 => {
                group(&mut rng, &mut w);
                w.push(VERBS.choose(&mut rng).unwrap().0.into());
                if rng.gen_bool(0.5) {
                    w.push(pick(&mut rng, ADVS).into());
                }
                w.push(pick(&mut rng, PREPS).into());
                group(&mut rng, &mut w);
            }
            // free mixture
            _ => {
                let n = rng.gen_range(6..25);
                for _ in 0..n {
                    let word = match rng.gen_range(0..7) {
                        0 => DETS.choose(&mut rng).unwrap().0,
                        1 | 2 => pick(&mut rng, NOUNS),
                        3 => VERBS.choose(&mut rng).unwrap().0,
                        4 => pick(&mut rng, ADJS),
                        5 => pick(&mut rng, PREPS),
                        _ => ["il", "et", ",", "rapidement"][rng.gen_range(0..4)],
                    };
                    w.push(word.into());
                }
            }
        }
        count += w.iter().filter(|t| t.as_str() != ",").count();
        let mut sentence = w.join(" ").replace(" ,", ",");
        if let Some(first) = sentence.chars().next() {
            let upper: String = first.to_uppercase().collect();
            sentence.replace_range(..first.len_utf8(), &upper);
        }
        text.push_str(&sentence);
        text.push('.');
        sentences_in_paragraph += 1;
        if sentences_in_paragraph == 12 {
            text.push_str("\n\n");
            sentences_in_paragraph = 0;
        } else {
            text.push(' ');
        }
    }
    text
}
