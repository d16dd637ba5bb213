//! Lexicon and parser evaluation.

pub mod gold;
pub mod report;
pub mod synth;

pub use gold::{read_gold, write_gold, GoldEntry};
pub use report::{evaluate_lexicon, EvalReport, VerbRow};
pub use synth::{gen_synth_corpus, gold_analysis, parse_seed_lexicon, SynthCorpus, SynthLabel, Templates};

use std::collections::{BTreeMap, BTreeSet};

use statrs::function::beta::beta_reg;

use crate::error::{format_err, Error, Result};
use crate::parser::Analysis;
use crate::statfilter::LexiconEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl EvalCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        EvalCounts { tp, fp, fn_ }
    }

    /// TP / (TP + FP), absent with nothing proposed.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// TP / (TP + FN), absent with an empty gold set.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }
}

impl std::ops::AddAssign for EvalCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

fn ratio(a: u64, b: u64) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

/// Type precision and recall of a proposed class set against a gold entry.
pub fn type_prf(proposed: &BTreeSet<String>, gold: &GoldEntry) -> EvalCounts {
    let tp = proposed.intersection(&gold.classes).count() as u64;
    EvalCounts {
        tp,
        fp: proposed.len() as u64 - tp,
        fn_: gold.classes.len() as u64 - tp,
    }
}

/// Accepted classes by descending count, ties by class id.
pub fn system_ranking(entry: &LexiconEntry) -> Vec<String> {
    let mut acc: Vec<_> = entry.accepted().collect();
    acc.sort_by(|a, b| b.m.cmp(&a.m).then_with(|| a.class.cmp(&b.class)));
    acc.into_iter().map(|r| r.class.clone()).collect()
}

/// Share of class pairs ordered the same way in both rankings. The correct
/// ranking is a list of tie groups, best first; pairs tied there are left
/// out. Only classes present in both rankings count. Absent when no pair
/// can be compared.
pub fn ranking_accuracy(system: &[String], correct: &[Vec<String>]) -> Option<f64> {
    let gold_pos: BTreeMap<&str, usize> = correct
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.iter().map(move |c| (c.as_str(), i)))
        .collect();
    let common: Vec<usize> = system
        .iter()
        .filter_map(|c| gold_pos.get(c.as_str()).copied())
        .collect();
    if common.len() < 2 {
        return None;
    }
    let (mut agree, mut total) = (0u64, 0u64);
    for i in 0..common.len() {
        for j in i + 1..common.len() {
            if common[i] != common[j] {
                total += 1;
                agree += u64::from(common[i] < common[j]);
            }
        }
    }
    ratio(agree, total)
}

/// Share of exemplar tokens whose gold class the entry accepts.
pub fn token_recall(accepted: &BTreeSet<String>, tokens: &BTreeMap<String, u64>) -> Option<f64> {
    let total: u64 = tokens.values().sum();
    let covered: u64 = tokens
        .iter()
        .filter(|(c, _)| accepted.contains(*c))
        .map(|(_, n)| n)
        .sum();
    ratio(covered, total)
}

/// Unlabelled constituent spans of one sentence, end exclusive, width >= 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracketing {
    pub sentence: usize,
    pub length: usize,
    pub spans: BTreeSet<(usize, usize)>,
}

impl Bracketing {
    /// Narrow spans are dropped and duplicates collapse.
    pub fn new(sentence: usize, length: usize, spans: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (s, e) in spans {
            if s >= e || e > length {
                return Err(Error::Invalid(format!(
                    "span ({s}, {e}) out of range for sentence {sentence} of length {length}"
                )));
            }
            if e - s >= 2 {
                set.insert((s, e));
            }
        }
        Ok(Bracketing {
            sentence,
            length,
            spans: set,
        })
    }

    pub fn from_analysis(sentence: usize, analysis: &Analysis) -> Self {
        Bracketing::new(sentence, analysis.len(), analysis.spans()).expect("analysis spans are in range")
    }
}

/// `sentence start end` lines, grouped by sentence.
pub fn read_bracketings(text: &str) -> Result<BTreeMap<usize, Vec<(usize, usize)>>> {
    let mut out: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format_err("bracketing", ln + 1, "expected three integers"))?;
        match f[..] {
            [s, a, b] => out.entry(s).or_default().push((a, b)),
            _ => return Err(format_err("bracketing", ln + 1, "expected `sentence start end`")),
        }
    }
    Ok(out)
}

pub fn write_bracketings(brackets: &[Bracketing]) -> String {
    let mut out = String::new();
    for b in brackets {
        for (s, e) in &b.spans {
            out.push_str(&format!("{} {s} {e}\n", b.sentence));
        }
    }
    out
}

/// Bracket comparison for one sentence or a sum over many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Geig {
    pub sentences: u64,
    pub crossings: u64,
    pub matched: u64,
    pub candidate: u64,
    pub gold: u64,
}

impl Geig {
    pub fn precision(&self) -> Option<f64> {
        ratio(self.matched, self.candidate)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.matched, self.gold)
    }

    pub fn mean_crossings(&self) -> Option<f64> {
        ratio(self.crossings, self.sentences)
    }
}

impl std::ops::AddAssign for Geig {
    fn add_assign(&mut self, o: Self) {
        self.sentences += o.sentences;
        self.crossings += o.crossings;
        self.matched += o.matched;
        self.candidate += o.candidate;
        self.gold += o.gold;
    }
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Candidate spans crossing some gold span, and matched-span precision/recall.
pub fn geig(candidate: &Bracketing, gold: &Bracketing) -> Result<Geig> {
    if candidate.length != gold.length {
        return Err(Error::Invalid(format!(
            "sentence {}: candidate length {} differs from gold length {}",
            gold.sentence, candidate.length, gold.length
        )));
    }
    Ok(Geig {
        sentences: 1,
        crossings: candidate
            .spans
            .iter()
            .filter(|&&c| gold.spans.iter().any(|&g| crosses(c, g)))
            .count() as u64,
        matched: candidate.spans.intersection(&gold.spans).count() as u64,
        candidate: candidate.spans.len() as u64,
        gold: gold.spans.len() as u64,
    })
}

/// Paired t-test result. `p` is the one-sided upper-tail probability of t.
#[derive(Debug, Clone, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: u64,
    pub p: Option<f64>,
    pub status: String,
}

/// Paired t-test on the differences `a - b`.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Invalid(format!("paired samples differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::Invalid("paired t-test needs at least two pairs".into()));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let df = a.len() as u64 - 1;
    if d.iter().all(|&x| x == d[0]) {
        return Ok(if mean == 0.0 {
            TTest {
                t: 0.0,
                df,
                p: Some(0.5),
                status: "ok: all differences zero".into(),
            }
        } else {
            TTest {
                t: mean.signum() * f64::INFINITY,
                df,
                p: None,
                status: "undefined: differences have zero variance".into(),
            }
        });
    }
    let t = mean / (var.sqrt() / n.sqrt());
    Ok(TTest {
        t,
        df,
        p: Some(t_upper_tail(t, df as f64)),
        status: "ok".into(),
    })
}

/// P(T > t) for Student's t with `df` degrees of freedom.
pub fn t_upper_tail(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let half = 0.5 * beta_reg(df / 2.0, 0.5, x);
    if t >= 0.0 {
        half
    } else {
        1.0 - half
    }
}
