//! Probabilistic shallow parsing with subcategorization-annotated rules.

pub mod analysis;
pub mod chart;
pub mod grammar;

pub use analysis::{Analysis, Node, NodeKind};
pub use chart::{coverage, parse, rank_order, DEFAULT_K, MAX_UNARY_CHAIN};
pub use grammar::{Grammar, GrammarRule, Role};

use crate::error::{format_err, Result};
use crate::sexpr::{self, Sexpr};

/// Ranked analyses for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceParses {
    pub sentence: usize,
    pub analyses: Vec<Analysis>,
}

impl SentenceParses {
    pub fn to_sexpr(&self) -> Sexpr {
        let mut items = vec![Sexpr::atom("parses"), Sexpr::atom(self.sentence.to_string())];
        items.extend(self.analyses.iter().map(Analysis::to_sexpr));
        Sexpr::list(items)
    }
}

/// One `(parses ID ANALYSIS...)` form per line.
pub fn write_parses(parses: &[SentenceParses]) -> String {
    let mut out = String::new();
    for p in parses {
        out.push_str(&p.to_sexpr().to_string());
        out.push('\n');
    }
    out
}

pub fn read_parses(text: &str, grammar: &Grammar) -> Result<Vec<SentenceParses>> {
    const WHAT: &str = "parses";
    sexpr::parse_all(text)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let items = match e.as_list() {
                Some([Sexpr::Atom(h), id, rest @ ..]) if h == "parses" => (id, rest),
                _ => return Err(format_err(WHAT, i + 1, "expected (parses ID ...)")),
            };
            let sentence = items
                .0
                .as_text()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format_err(WHAT, i + 1, "bad sentence id"))?;
            let analyses = items
                .1
                .iter()
                .map(|a| Analysis::from_sexpr(a, grammar))
                .collect::<Result<Vec<_>>>()?;
            Ok(SentenceParses { sentence, analyses })
        })
        .collect()
}
