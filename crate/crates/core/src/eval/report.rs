//! Plain-text evaluation reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{ranking_accuracy, system_ranking, token_recall, type_prf, EvalCounts, Geig, GoldEntry, TTest};
use crate::statfilter::Lexicon;

#[derive(Debug, Clone, PartialEq)]
pub struct VerbRow {
    pub verb: String,
    pub counts: EvalCounts,
    pub ranking: Option<f64>,
    pub token_recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<VerbRow>,
    pub totals: EvalCounts,
    pub baseline: Option<Geig>,
    pub reranked: Option<Geig>,
    pub ttest: Option<TTest>,
}

/// Per-verb type scores for every gold verb; verbs missing from the
/// lexicon propose nothing.
pub fn evaluate_lexicon(lexicon: &Lexicon, gold: &BTreeMap<String, GoldEntry>) -> EvalReport {
    let mut report = EvalReport::default();
    for (verb, g) in gold {
        let entry = lexicon.get(verb);
        let proposed: BTreeSet<String> = entry
            .map(|e| e.accepted().map(|r| r.class.clone()).collect())
            .unwrap_or_default();
        let counts = type_prf(&proposed, g);
        report.totals += counts;
        let ranking = match (entry, &g.ranking) {
            (Some(e), Some(r)) => {
                let tp: Vec<String> = system_ranking(e)
                    .into_iter()
                    .filter(|c| g.classes.contains(c))
                    .collect();
                ranking_accuracy(&tp, r)
            }
            _ => None,
        };
        report.rows.push(VerbRow {
            verb: verb.clone(),
            counts,
            ranking,
            token_recall: token_recall(&proposed, &g.tokens),
        });
    }
    report
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{:.1}", v * 100.0))
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl EvalReport {
    /// Mean of the per-verb values that are defined.
    fn mean(&self, f: impl Fn(&VerbRow) -> Option<f64>) -> Option<f64> {
        let v: Vec<f64> = self.rows.iter().filter_map(f).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn mean_ranking(&self) -> Option<f64> {
        self.mean(|r| r.ranking)
    }

    pub fn mean_token_recall(&self) -> Option<f64> {
        self.mean(|r| r.token_recall)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = self.rows.iter().map(|r| r.verb.len()).max().unwrap_or(4).max(5);
        let _ = writeln!(
            out,
            "{:<w$}  {:>4}  {:>4}  {:>4}  {:>9}  {:>6}  {:>7}  {:>12}",
            "verb", "TP", "FP", "FN", "precision", "recall", "ranking", "token-recall"
        );
        let line = |out: &mut String, name: &str, c: &EvalCounts, rk: Option<f64>, tr: Option<f64>| {
            let _ = writeln!(
                out,
                "{:<w$}  {:>4}  {:>4}  {:>4}  {:>9}  {:>6}  {:>7}  {:>12}",
                name,
                c.tp,
                c.fp,
                c.fn_,
                pct(c.precision()),
                pct(c.recall()),
                pct(rk),
                pct(tr)
            );
        };
        for r in &self.rows {
            line(&mut out, &r.verb, &r.counts, r.ranking, r.token_recall);
        }
        line(&mut out, "total", &self.totals, self.mean_ranking(), self.mean_token_recall());

        if self.baseline.is_some() || self.reranked.is_some() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<12}  {:>9}  {:>9}  {:>9}  {:>9}",
                "parser", "sentences", "crossings", "precision", "recall"
            );
            for (name, g) in [("baseline", &self.baseline), ("lexicalized", &self.reranked)] {
                if let Some(g) = g {
                    let _ = writeln!(
                        out,
                        "{:<12}  {:>9}  {:>9}  {:>9}  {:>9}",
                        name,
                        g.sentences,
                        g.mean_crossings().map_or("-".into(), |v| format!("{v:.3}")),
                        pct(g.precision()),
                        pct(g.recall())
                    );
                }
            }
        }
        if let Some(t) = &self.ttest {
            let _ = writeln!(out, "\npaired t = {:.4}, df = {}, p = {} ({})", t.t, t.df, num(t.p), t.status);
        }

        let _ = writeln!(out, "\n[metrics]");
        let _ = writeln!(out, "tp={}", self.totals.tp);
        let _ = writeln!(out, "fp={}", self.totals.fp);
        let _ = writeln!(out, "fn={}", self.totals.fn_);
        let _ = writeln!(out, "type_precision={}", num(self.totals.precision()));
        let _ = writeln!(out, "type_recall={}", num(self.totals.recall()));
        let _ = writeln!(out, "ranking_accuracy={}", num(self.mean_ranking()));
        let _ = writeln!(out, "token_recall={}", num(self.mean_token_recall()));
        for (name, g) in [("baseline", &self.baseline), ("lexicalized", &self.reranked)] {
            if let Some(g) = g {
                let _ = writeln!(out, "{name}_mean_crossings={}", num(g.mean_crossings()));
                let _ = writeln!(out, "{name}_bracket_precision={}", num(g.precision()));
                let _ = writeln!(out, "{name}_bracket_recall={}", num(g.recall()));
            }
        }
        if let Some(t) = &self.ttest {
            let _ = writeln!(out, "t={:.6}", t.t);
            let _ = writeln!(out, "df={}", t.df);
            let _ = writeln!(out, "p={}", num(t.p));
        }
        out
    }
}
