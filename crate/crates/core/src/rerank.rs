//! Lexicalized reranking of parser output.
//!
//! Every verbal predicate in an analysis is extracted and classified in
//! place, and the analysis score is adjusted by the log frequency of that
//! class for the verb in an acquired lexicon.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parser::Analysis;
use crate::patterns::{extract, predicate_instances, ClassInventory, Classification};
use crate::statfilter::{Lexicon, LexiconEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RerankMode {
    /// Add-one smoothed relative frequency over the inventory.
    #[default]
    Smoothed,
    /// Raw count `m`, scored as `ln(m + 1)`.
    Raw,
}

impl FromStr for RerankMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoothed" => Ok(RerankMode::Smoothed),
            "raw" => Ok(RerankMode::Raw),
            _ => Err(Error::Invalid(format!("unknown rerank mode `{s}` (expected raw or smoothed)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RerankOptions {
    pub mode: RerankMode,
    /// Multiplier on the lexical adjustment.
    pub weight: f64,
}

impl Default for RerankOptions {
    fn default() -> Self {
        RerankOptions {
            mode: RerankMode::Smoothed,
            weight: 1.0,
        }
    }
}

/// `(m_i + 1) / (n_classified + K)`. Unclassifiable patterns get the unit
/// mass of an unseen class. A missing entry gives the uniform `1 / K`.
pub fn smoothed_freq(entry: Option<&LexiconEntry>, class: &Classification, inventory: &ClassInventory) -> Result<f64> {
    let k = inventory.len() as u64;
    if k == 0 {
        return Err(Error::Invalid("empty class inventory".into()));
    }
    let n = entry.map_or(0, LexiconEntry::classified);
    let m = match class {
        Classification::Class(id) if !inventory.contains(id) => return Err(Error::UnknownClass(id.clone())),
        Classification::Class(id) => entry.map_or(0, |e| e.count(id)),
        Classification::Unclassifiable => 0,
    };
    Ok((m + 1) as f64 / (n + k) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceScore {
    pub index: usize,
    pub verb: String,
    pub class: Classification,
    pub log_freq: f64,
}

/// Score breakdown for one analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalizedScore {
    /// Rank in the parser's ordering.
    pub rank: usize,
    pub base: f64,
    pub instances: Vec<InstanceScore>,
    pub adjustment: f64,
    pub combined: f64,
}

pub fn score_analysis(
    analysis: &Analysis,
    sentence: usize,
    lexicon: &Lexicon,
    inventory: &ClassInventory,
    options: &RerankOptions,
) -> Result<LexicalizedScore> {
    let mut instances = Vec::new();
    for idx in predicate_instances(analysis) {
        let Some(p) = extract(analysis, idx, sentence)? else {
            continue;
        };
        let class = inventory.classify(&p);
        let entry = lexicon.get(&p.predicate.lemma);
        let log_freq = match options.mode {
            RerankMode::Smoothed => smoothed_freq(entry, &class, inventory)?.ln(),
            RerankMode::Raw => {
                let m = match &class {
                    Classification::Class(id) => entry.map_or(0, |e| e.count(id)),
                    Classification::Unclassifiable => 0,
                };
                ((m + 1) as f64).ln()
            }
        };
        instances.push(InstanceScore {
            index: idx,
            verb: p.predicate.lemma.clone(),
            class,
            log_freq,
        });
    }
    let adjustment = options.weight * instances.iter().map(|i| i.log_freq).sum::<f64>();
    Ok(LexicalizedScore {
        rank: analysis.rank,
        base: analysis.score,
        instances,
        adjustment,
        combined: analysis.score + adjustment,
    })
}

/// Analyses of one sentence in lexicalized order, paired with their scores.
/// The sort is stable, so equal combined scores keep the parser's order.
pub fn rerank(
    analyses: &[Analysis],
    sentence: usize,
    lexicon: &Lexicon,
    inventory: &ClassInventory,
    options: &RerankOptions,
) -> Result<Vec<(Analysis, LexicalizedScore)>> {
    let mut scored = analyses
        .iter()
        .map(|a| Ok((a.clone(), score_analysis(a, sentence, lexicon, inventory, options)?)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.1.combined.total_cmp(&a.1.combined));
    Ok(scored)
}

/// Audit lines: `sentence new_rank old_rank base adjustment combined classes`.
pub fn write_ledger(sentence: usize, scored: &[(Analysis, LexicalizedScore)]) -> String {
    let mut out = String::new();
    for (new_rank, (_, s)) in scored.iter().enumerate() {
        let classes: Vec<String> = s
            .instances
            .iter()
            .map(|i| format!("{}@{}={}", i.verb, i.index, i.class))
            .collect();
        let _ = writeln!(
            out,
            "{sentence}\t{new_rank}\t{}\t{:.9}\t{:.9}\t{:.9}\t{}",
            s.rank,
            s.base,
            s.adjustment,
            s.combined,
            classes.join(" ")
        );
    }
    out
}
