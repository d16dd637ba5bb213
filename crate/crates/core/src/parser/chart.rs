//! Bottom-up k-best chart parser.
//!
//! Every cell keeps, per category, the k best derivations over its span.
//! Scores are additive in log space, so the k best combinations of a rule's
//! children only ever draw on the k best entries of each child cell, which
//! makes the truncated chart exact. Unary chains are capped at
//! [`MAX_UNARY_CHAIN`] rules.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use super::analysis::{Analysis, TreeSpec};
use super::grammar::Grammar;
use crate::ingest::TaggedToken;

pub const MAX_UNARY_CHAIN: usize = 3;
pub const DEFAULT_K: usize = 10;

/// Resolution at which two log scores count as tied.
const SCORE_QUANTUM: f64 = 1e-9;

#[derive(Debug)]
struct Deriv {
    rule: usize,
    score: f64,
    /// Rule ids in preorder: the leftmost derivation, unique per tree.
    key: Vec<u32>,
    children: Vec<Child>,
}

#[derive(Debug, Clone)]
enum Child {
    Phrase(Rc<Deriv>),
    Leaf { pos: usize, tag: String, penalty: f64 },
}

#[derive(Debug, Clone)]
struct Partial {
    score: f64,
    key: Vec<u32>,
    children: Vec<Child>,
}

fn quantize(score: f64) -> i64 {
    (score / SCORE_QUANTUM).round() as i64
}

/// Ranking order: higher score first, then by leftmost-derivation rule sequence.
pub fn rank_order(a_score: f64, a_key: &[u32], b_score: f64, b_key: &[u32]) -> Ordering {
    quantize(b_score)
        .cmp(&quantize(a_score))
        .then_with(|| a_key.cmp(b_key))
}

fn sort_truncate<T>(v: &mut Vec<T>, k: usize, f: impl Fn(&T) -> (f64, &[u32])) {
    v.sort_by(|a, b| {
        let (sa, ka) = f(a);
        let (sb, kb) = f(b);
        rank_order(sa, ka, sb, kb)
    });
    v.truncate(k);
}

type Cell = HashMap<usize, Vec<Rc<Deriv>>>;

/// Up to `k` complete analyses rooted in the start symbol, best first.
/// An empty result means the sentence is outside the grammar's coverage.
pub fn parse(sentence: &[TaggedToken], grammar: &Grammar, k: usize) -> Vec<Analysis> {
    let k = k.max(1);
    let n = sentence.len();
    if n == 0 {
        return Vec::new();
    }
    let terminals = grammar.terminals();
    // candidate terminals per position
    let options: Vec<Vec<(String, f64)>> = sentence
        .iter()
        .map(|t| {
            std::iter::once((t.tag.clone(), 0.0))
                .chain(t.alts.iter().map(|(tag, lo)| (tag.clone(), lo.min(0.0))))
                .filter(|(tag, _)| terminals.contains(tag))
                .collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Vec::new();
    }

    let rules = grammar.rules();
    let is_unary = |r: usize| rules[r].rhs.len() == 1 && grammar.is_nonterminal(&rules[r].rhs[0]);
    let nonunary: Vec<usize> = (0..rules.len()).filter(|&r| !is_unary(r)).collect();
    let unary: Vec<usize> = (0..rules.len()).filter(|&r| is_unary(r)).collect();
    let lhs_index: HashMap<&str, usize> = grammar
        .nonterminals()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let sym = |s: &str| lhs_index.get(s).copied();

    // chart[i][w] covers [i, i + w]
    let mut chart: Vec<Vec<Cell>> = (0..n).map(|i| vec![Cell::new(); n - i + 1]).collect();

    for width in 1..=n {
        for i in 0..=n - width {
            let j = i + width;
            let mut cell = Cell::new();
            for &r in &nonunary {
                let rule = &rules[r];
                let done = combine(rule.rhs.as_slice(), i, j, k, &options, &chart, grammar, &sym);
                if done.is_empty() {
                    continue;
                }
                let entry = cell.entry(sym(&rule.lhs).unwrap()).or_default();
                entry.extend(done.into_iter().map(|p| {
                    let mut key = Vec::with_capacity(p.key.len() + 1);
                    key.push(r as u32);
                    key.extend_from_slice(&p.key);
                    Rc::new(Deriv {
                        rule: r,
                        score: p.score + rule.log_prob,
                        key,
                        children: p.children,
                    })
                }));
            }
            for list in cell.values_mut() {
                sort_truncate(list, k, |d| (d.score, &d.key));
            }

            let mut round = cell.clone();
            for _ in 0..MAX_UNARY_CHAIN {
                let mut next = Cell::new();
                for &r in &unary {
                    let rule = &rules[r];
                    let Some(below) = round.get(&sym(&rule.rhs[0]).unwrap()) else {
                        continue;
                    };
                    let entry = next.entry(sym(&rule.lhs).unwrap()).or_default();
                    for d in below {
                        let mut key = Vec::with_capacity(d.key.len() + 1);
                        key.push(r as u32);
                        key.extend_from_slice(&d.key);
                        entry.push(Rc::new(Deriv {
                            rule: r,
                            score: d.score + rule.log_prob,
                            key,
                            children: vec![Child::Phrase(Rc::clone(d))],
                        }));
                    }
                }
                next.retain(|_, v| !v.is_empty());
                if next.is_empty() {
                    break;
                }
                for (s, list) in next.iter_mut() {
                    sort_truncate(list, k, |d| (d.score, &d.key));
                    cell.entry(*s).or_default().extend(list.iter().cloned());
                }
                round = next;
            }
            for list in cell.values_mut() {
                sort_truncate(list, k, |d| (d.score, &d.key));
            }
            chart[i][width] = cell;
        }
    }

    let Some(top) = sym(&grammar.start).and_then(|s| chart[0][n].get(&s)) else {
        return Vec::new();
    };
    top.iter()
        .enumerate()
        .map(|(rank, d)| Analysis::build(&to_spec(d, sentence), grammar, d.score, rank + 1))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn combine(
    rhs: &[String],
    i: usize,
    j: usize,
    k: usize,
    options: &[Vec<(String, f64)>],
    chart: &[Vec<Cell>],
    grammar: &Grammar,
    sym: &impl Fn(&str) -> Option<usize>,
) -> Vec<Partial> {
    // partial[m]: best prefixes of rhs covering [i, m)
    let mut partial: HashMap<usize, Vec<Partial>> = HashMap::new();
    partial.insert(
        i,
        vec![Partial {
            score: 0.0,
            key: Vec::new(),
            children: Vec::new(),
        }],
    );
    for (p, s) in rhs.iter().enumerate() {
        let remaining = rhs.len() - p - 1;
        let mut next: HashMap<usize, Vec<Partial>> = HashMap::new();
        let mut starts: Vec<usize> = partial.keys().copied().collect();
        starts.sort_unstable();
        for m in starts {
            if m + 1 + remaining > j {
                continue;
            }
            let prefixes = &partial[&m];
            if grammar.is_nonterminal(s) {
                let nt = sym(s).unwrap();
                for e in m + 1..=j - remaining {
                    if e - m == j - i {
                        // only a unary rule spans the whole cell with one child
                        continue;
                    }
                    let Some(items) = chart[m][e - m].get(&nt) else {
                        continue;
                    };
                    let out = next.entry(e).or_default();
                    for pre in prefixes {
                        for d in items {
                            let mut key = pre.key.clone();
                            key.extend_from_slice(&d.key);
                            let mut children = pre.children.clone();
                            children.push(Child::Phrase(Rc::clone(d)));
                            out.push(Partial {
                                score: pre.score + d.score,
                                key,
                                children,
                            });
                        }
                    }
                }
            } else {
                let Some((tag, penalty)) = options[m].iter().find(|(t, _)| t == s) else {
                    continue;
                };
                let out = next.entry(m + 1).or_default();
                for pre in prefixes {
                    let mut children = pre.children.clone();
                    children.push(Child::Leaf {
                        pos: m,
                        tag: tag.clone(),
                        penalty: *penalty,
                    });
                    out.push(Partial {
                        score: pre.score + penalty,
                        key: pre.key.clone(),
                        children,
                    });
                }
            }
        }
        for list in next.values_mut() {
            sort_truncate(list, k, |p| (p.score, &p.key));
        }
        partial = next;
        if partial.is_empty() {
            return Vec::new();
        }
    }
    partial.remove(&j).unwrap_or_default()
}

fn to_spec(d: &Deriv, sentence: &[TaggedToken]) -> TreeSpec {
    TreeSpec::Phrase {
        rule: d.rule,
        children: d
            .children
            .iter()
            .map(|c| match c {
                Child::Phrase(inner) => to_spec(inner, sentence),
                Child::Leaf { pos, tag, penalty } => {
                    let mut token = sentence[*pos].clone();
                    token.tag = tag.clone();
                    token.alts.clear();
                    TreeSpec::Leaf {
                        token,
                        penalty: *penalty,
                    }
                }
            })
            .collect(),
    }
}

/// Fraction of sentences with at least one analysis.
pub fn coverage(corpus: &[Vec<TaggedToken>], grammar: &Grammar) -> crate::error::Result<f64> {
    if corpus.is_empty() {
        return Err(crate::error::Error::EmptyCorpus);
    }
    let parsed = corpus
        .iter()
        .filter(|s| !parse(s, grammar, 1).is_empty())
        .count();
    Ok(parsed as f64 / corpus.len() as f64)
}
