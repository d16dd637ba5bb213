//! Binomial hypothesis filtering of class hypotheses into lexicon entries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use statrs::function::factorial::ln_binomial;

use crate::error::{format_err, Error, Result};
use crate::ingest::lemma::strip_comment;
use crate::patterns::{ClassInventory, ClassifiedGroups, Classification};

pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Dictionary membership for one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassPrior {
    pub members: u64,
    pub total: u64,
}

/// Dictionary membership counts for every class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Priors {
    pub total: u64,
    pub members: BTreeMap<String, u64>,
    /// Classes whose counts are flagged as estimates.
    pub estimated: BTreeSet<String>,
}

impl Priors {
    /// `TOTAL_VERBS n` plus `CLASS count` lines; a trailing `# estimate`
    /// comment flags an estimated count.
    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "priors";
        let mut p = Priors::default();
        let mut total = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (key, value) = parse_count_line(line).map_err(|m| format_err(WHAT, ln + 1, m))?;
            if key == "TOTAL_VERBS" {
                total = Some(value);
            } else {
                if p.members.insert(key.to_string(), value).is_some() {
                    return Err(format_err(WHAT, ln + 1, format!("duplicate class `{key}`")));
                }
                if raw.contains("estimate") {
                    p.estimated.insert(key.to_string());
                }
            }
        }
        p.total = total.ok_or_else(|| format_err(WHAT, 0, "missing TOTAL_VERBS"))?;
        if p.total == 0 {
            return Err(format_err(WHAT, 0, "TOTAL_VERBS must be positive"));
        }
        if let Some((c, m)) = p.members.iter().find(|(_, &m)| m > p.total) {
            return Err(format_err(WHAT, 0, format!("{c} has {m} members, more than the total")));
        }
        Ok(p)
    }

    pub fn get(&self, class: &str) -> Result<ClassPrior> {
        self.members
            .get(class)
            .map(|&members| ClassPrior {
                members,
                total: self.total,
            })
            .ok_or_else(|| Error::MissingPrior(class.to_string()))
    }

    /// Every inventory class must have a prior.
    pub fn check_covers(&self, inventory: &ClassInventory) -> Result<()> {
        for c in inventory.classes() {
            self.get(&c.id)?;
        }
        Ok(())
    }
}

/// Extracted-pattern counts per class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternStats {
    pub total: u64,
    pub counts: BTreeMap<String, u64>,
}

impl PatternStats {
    /// `TOTAL_PATTERNS n` plus `CLASS count` lines.
    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "pattern stats";
        let mut s = PatternStats::default();
        let mut total = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (key, value) = parse_count_line(line).map_err(|m| format_err(WHAT, ln + 1, m))?;
            if key == "TOTAL_PATTERNS" {
                total = Some(value);
            } else if s.counts.insert(key.to_string(), value).is_some() {
                return Err(format_err(WHAT, ln + 1, format!("duplicate class `{key}`")));
            }
        }
        s.total = total.ok_or_else(|| format_err(WHAT, 0, "missing TOTAL_PATTERNS"))?;
        s.validate()?;
        Ok(s)
    }

    /// Counts of selected patterns per class over all predicates. Every
    /// inventory class gets an entry; unclassifiable patterns count towards
    /// the total only.
    pub fn from_classified(groups: &ClassifiedGroups, inventory: &ClassInventory) -> Result<Self> {
        let mut s = PatternStats {
            total: 0,
            counts: inventory.classes().iter().map(|c| (c.id.clone(), 0)).collect(),
        };
        for inst in groups.values().flatten() {
            s.total += 1;
            if let Classification::Class(id) = &inst.class {
                *s.counts.entry(id.clone()).or_default() += 1;
            }
        }
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.total == 0 {
            return Err(Error::Invalid("pattern total must be positive".into()));
        }
        let sum: u64 = self.counts.values().sum();
        if sum > self.total {
            return Err(Error::Invalid(format!(
                "class pattern counts sum to {sum}, more than the total {}",
                self.total
            )));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("TOTAL_PATTERNS {}\n", self.total);
        for (c, n) in &self.counts {
            let _ = writeln!(out, "{c} {n}");
        }
        out
    }

    pub fn get(&self, class: &str) -> Result<u64> {
        self.counts
            .get(class)
            .copied()
            .ok_or_else(|| Error::MissingStat(class.to_string()))
    }
}

fn parse_count_line(line: &str) -> std::result::Result<(&str, u64), String> {
    match line.split_whitespace().collect::<Vec<_>>()[..] {
        [k, v] => v
            .parse()
            .map(|v| (k, v))
            .map_err(|_| format!("bad count `{v}`")),
        _ => Err("expected `KEY COUNT`".into()),
    }
}

/// Probability that a verb outside class `class` yields a pattern for it:
/// (1 - members/total) * patterns_for_class/patterns.
pub fn error_prob(class: &str, priors: &Priors, stats: &PatternStats) -> Result<f64> {
    let prior = priors.get(class)?;
    let count = stats.get(class)?;
    if stats.total == 0 {
        return Err(Error::Invalid("pattern total must be positive".into()));
    }
    let outside = 1.0 - prior.members as f64 / prior.total as f64;
    Ok((outside * count as f64 / stats.total as f64).clamp(0.0, 1.0))
}

fn check_binom(m: u64, n: u64, p: f64) -> Result<()> {
    if m > n {
        return Err(Error::Invalid(format!("m = {m} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// P(m, n, p): exactly `m` successes in `n` trials.
pub fn binom_pmf(m: u64, n: u64, p: f64) -> Result<f64> {
    check_binom(m, n, p)?;
    Ok(pmf(m, n, p))
}

fn pmf(m: u64, n: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(n, m) + m as f64 * p.ln() + (n - m) as f64 * (-p).ln_1p();
    ln.exp()
}

/// P(m+, n, p): at least `m` successes in `n` trials.
pub fn binom_tail(m: u64, n: u64, p: f64) -> Result<f64> {
    check_binom(m, n, p)?;
    let tail = if 2 * m <= n {
        1.0 - (0..m).map(|i| pmf(i, n, p)).sum::<f64>()
    } else {
        (m..=n).map(|i| pmf(i, n, p)).sum::<f64>()
    };
    Ok(tail.clamp(0.0, 1.0))
}

/// Evidence for one (verb, class) hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterInput {
    pub verb: String,
    pub class: String,
    pub m: u64,
    pub n: u64,
    pub threshold: f64,
}

impl FilterInput {
    pub fn validate(&self) -> Result<()> {
        if self.m > self.n {
            return Err(Error::Invalid(format!(
                "{}/{}: m = {} exceeds n = {}",
                self.verb, self.class, self.m, self.n
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Invalid(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub accepted: bool,
    pub p_value: f64,
}

/// Accept iff P(m+, n, p) is at most the threshold.
pub fn filter_class(input: &FilterInput, p: f64) -> Result<Decision> {
    input.validate()?;
    let p_value = binom_tail(input.m, input.n, p)?;
    Ok(Decision {
        accepted: p_value <= input.threshold,
        p_value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOptions {
    pub threshold: f64,
    /// Accept any class with more than this many exemplars regardless of
    /// the test. Off by default.
    pub accept_above: Option<u64>,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            threshold: DEFAULT_THRESHOLD,
            accept_above: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassRecord {
    pub class: String,
    pub m: u64,
    pub n: u64,
    pub p_err: f64,
    pub p_value: f64,
    pub accepted: bool,
    /// Share among accepted classes; zero when rejected.
    pub rel_freq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub verb: String,
    pub n: u64,
    /// Sorted by descending m, then class id.
    pub records: Vec<ClassRecord>,
}

impl LexiconEntry {
    pub fn accepted(&self) -> impl Iterator<Item = &ClassRecord> {
        self.records.iter().filter(|r| r.accepted)
    }

    pub fn count(&self, class: &str) -> u64 {
        self.records.iter().find(|r| r.class == class).map_or(0, |r| r.m)
    }

    /// Σ m over classified patternsets.
    pub fn classified(&self) -> u64 {
        self.records.iter().map(|r| r.m).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub corpus: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lexicon {
    pub provenance: Provenance,
    pub entries: BTreeMap<String, LexiconEntry>,
}

/// One entry per verb with at least one patternset.
pub fn build_lexicon(
    groups: &ClassifiedGroups,
    inventory: &ClassInventory,
    priors: &Priors,
    stats: &PatternStats,
    options: &FilterOptions,
) -> Result<Lexicon> {
    let mut lexicon = Lexicon::default();
    for (verb, insts) in groups {
        if insts.is_empty() {
            continue;
        }
        lexicon
            .entries
            .insert(verb.clone(), build_entry(verb, insts, inventory, priors, stats, options)?);
    }
    Ok(lexicon)
}

fn build_entry(
    verb: &str,
    insts: &[crate::patterns::ClassifiedInstance],
    inventory: &ClassInventory,
    priors: &Priors,
    stats: &PatternStats,
    options: &FilterOptions,
) -> Result<LexiconEntry> {
    let n = insts.len() as u64;
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for i in insts {
        if let Some(c) = i.class.class_id() {
            if !inventory.contains(c) {
                return Err(Error::UnknownClass(c.to_string()));
            }
            *counts.entry(c).or_default() += 1;
        }
    }
    let mut records = Vec::with_capacity(counts.len());
    for (class, m) in counts {
        let p_err = error_prob(class, priors, stats)?;
        let input = FilterInput {
            verb: verb.to_string(),
            class: class.to_string(),
            m,
            n,
            threshold: options.threshold,
        };
        let d = filter_class(&input, p_err)?;
        records.push(ClassRecord {
            class: class.to_string(),
            m,
            n,
            p_err,
            p_value: d.p_value,
            accepted: d.accepted || options.accept_above.is_some_and(|k| m > k),
            rel_freq: 0.0,
        });
    }
    let accepted_total: u64 = records.iter().filter(|r| r.accepted).map(|r| r.m).sum();
    for r in records.iter_mut().filter(|r| r.accepted) {
        r.rel_freq = r.m as f64 / accepted_total as f64;
    }
    records.sort_by(|a, b| b.m.cmp(&a.m).then_with(|| a.class.cmp(&b.class)));
    Ok(LexiconEntry {
        verb: verb.to_string(),
        n,
        records,
    })
}

impl Lexicon {
    pub fn get(&self, verb: &str) -> Option<&LexiconEntry> {
        self.entries.get(verb)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# corpus={} config={}",
            self.provenance.corpus, self.provenance.config_hash
        );
        for e in self.entries.values() {
            let _ = writeln!(out, "VERB {} {}", e.verb, e.n);
            for r in &e.records {
                let _ = writeln!(
                    out,
                    "{} {} {:.9} {:.9} {} {:.9}",
                    r.class,
                    r.m,
                    r.p_err,
                    r.p_value,
                    if r.accepted { "yes" } else { "no" },
                    r.rel_freq
                );
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "lexicon";
        let mut lex = Lexicon::default();
        let mut current: Option<LexiconEntry> = None;
        for (ln, raw) in text.lines().enumerate() {
            let err = |m: String| format_err(WHAT, ln + 1, m);
            if let Some(meta) = raw.trim().strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("corpus", v)) => lex.provenance.corpus = v.to_string(),
                        Some(("config", v)) => lex.provenance.config_hash = v.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            let f: Vec<&str> = raw.split_whitespace().collect();
            match f[..] {
                [] => {}
                ["VERB", verb, n] => {
                    if let Some(e) = current.take() {
                        lex.entries.insert(e.verb.clone(), e);
                    }
                    current = Some(LexiconEntry {
                        verb: verb.to_string(),
                        n: n.parse().map_err(|_| err(format!("bad n `{n}`")))?,
                        records: Vec::new(),
                    });
                }
                [class, m, p_err, p_value, acc, rel] => {
                    let e = current
                        .as_mut()
                        .ok_or_else(|| err("class line before VERB".into()))?;
                    let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
                    let m: u64 = m.parse().map_err(|_| err(format!("bad m `{m}`")))?;
                    if m > e.n {
                        return Err(err(format!("m = {m} exceeds n = {}", e.n)));
                    }
                    e.records.push(ClassRecord {
                        class: class.to_string(),
                        m,
                        n: e.n,
                        p_err: num(p_err)?,
                        p_value: num(p_value)?,
                        accepted: match acc {
                            "yes" => true,
                            "no" => false,
                            _ => return Err(err(format!("bad accepted flag `{acc}`"))),
                        },
                        rel_freq: num(rel)?,
                    });
                }
                _ => return Err(err("expected `VERB lemma n` or a class record".into())),
            }
        }
        if let Some(e) = current.take() {
            lex.entries.insert(e.verb.clone(), e);
        }
        Ok(lex)
    }
}
