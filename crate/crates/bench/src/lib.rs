//! Shared setup for the benchmarks in `benches/`.

use stk_core::annotate::Pipeline;
use stk_core::catalog::parse_catalog;
use stk_core::tagger::parse_rules;

const CATALOG: &str = include_str!("../fixtures/synthetic.cat");
const RULES: &str = include_str!("../fixtures/synthetic.rules");

/// Pipeline over the synthetic lexicon with a small clue catalog.
pub fn pipeline() -> Pipeline {
    Pipeline::new(
        parse_catalog(CATALOG).expect("bench catalog"),
        stk_core::synthetic::lexicon(),
        parse_rules(RULES).expect("bench rules"),
    )
}
