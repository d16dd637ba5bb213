//! Brute-force derivation enumeration for small grammars.

use subcat::ingest::TaggedToken;
use subcat::parser::{parse, rank_order, Grammar, MAX_UNARY_CHAIN};

#[derive(Debug, Clone)]
pub struct Deriv {
    pub score: f64,
    pub rules: Vec<u32>,
}

/// Every derivation of `sym` over `[i, j)`, allowing at most `budget` more
/// unary nonterminal rules in a row.
fn derive(
    g: &Grammar,
    options: &[Vec<(String, f64)>],
    sym: &str,
    i: usize,
    j: usize,
    budget: usize,
) -> Vec<Deriv> {
    let mut out = Vec::new();
    for (id, r) in g.rules().iter().enumerate() {
        if r.lhs != sym {
            continue;
        }
        let unary = r.rhs.len() == 1 && g.is_nonterminal(&r.rhs[0]);
        if unary {
            if budget == 0 {
                continue;
            }
            for d in derive(g, options, &r.rhs[0], i, j, budget - 1) {
                let mut rules = vec![id as u32];
                rules.extend(d.rules);
                out.push(Deriv {
                    score: d.score + r.log_prob,
                    rules,
                });
            }
        } else {
            for d in seq(g, options, &r.rhs, i, j) {
                let mut rules = vec![id as u32];
                rules.extend(d.rules);
                out.push(Deriv {
                    score: d.score + r.log_prob,
                    rules,
                });
            }
        }
    }
    out
}

/// Derivations of a symbol sequence over `[i, j)`, each symbol covering at least one token.
fn seq(g: &Grammar, options: &[Vec<(String, f64)>], rhs: &[String], i: usize, j: usize) -> Vec<Deriv> {
    let Some((first, rest)) = rhs.split_first() else {
        return if i == j {
            vec![Deriv {
                score: 0.0,
                rules: vec![],
            }]
        } else {
            vec![]
        };
    };
    let mut out = Vec::new();
    for m in i + 1..=j.saturating_sub(rest.len()) {
        let heads: Vec<Deriv> = if g.is_nonterminal(first) {
            derive(g, options, first, i, m, MAX_UNARY_CHAIN)
        } else if m == i + 1 {
            options[i]
                .iter()
                .find(|(t, _)| t == first)
                .map(|(_, p)| Deriv {
                    score: *p,
                    rules: vec![],
                })
                .into_iter()
                .collect()
        } else {
            vec![]
        };
        if heads.is_empty() {
            continue;
        }
        let tails = seq(g, options, rest, m, j);
        for h in &heads {
            for t in &tails {
                let mut rules = h.rules.clone();
                rules.extend(&t.rules);
                out.push(Deriv {
                    score: h.score + t.score,
                    rules,
                });
            }
        }
    }
    out
}

pub fn enumerate(g: &Grammar, sentence: &[TaggedToken]) -> Vec<Deriv> {
    let options: Vec<Vec<(String, f64)>> = sentence
        .iter()
        .map(|t| {
            std::iter::once((t.tag.clone(), 0.0))
                .chain(t.alts.iter().map(|(a, lo)| (a.clone(), lo.min(0.0))))
                .collect()
        })
        .collect();
    let mut all = derive(g, &options, &g.start, 0, sentence.len(), MAX_UNARY_CHAIN);
    all.sort_by(|a, b| rank_order(a.score, &a.rules, b.score, &b.rules));
    all
}

pub fn sentence(tags: &[&str]) -> Vec<TaggedToken> {
    tags.iter()
        .enumerate()
        .map(|(i, t)| TaggedToken::new(i, format!("w{i}"), *t))
        .collect()
}

pub fn check(g: &Grammar, s: &[TaggedToken]) -> usize {
    let expected = enumerate(g, s);
    if expected.len() > 200 {
        return 0;
    }
    let got = parse(s, g, 100_000);
    assert_eq!(got.len(), expected.len(), "derivation count for {s:?}");
    for (rank, (a, d)) in got.iter().zip(&expected).enumerate() {
        let ids: Vec<u32> = a.rule_ids().iter().map(|&r| r as u32).collect();
        assert_eq!(ids, d.rules, "rank {}", rank + 1);
        assert!((a.score - d.score).abs() < 1e-9);
        assert!((a.recompute_score(g) - a.score).abs() < 1e-9);
        assert_eq!(a.rank, rank + 1);
    }
    // truncation keeps a prefix of the full ranking
    for k in [1, 2, 5] {
        let top = parse(s, g, k);
        assert_eq!(top.len(), expected.len().min(k));
        for (a, d) in top.iter().zip(&expected) {
            let ids: Vec<u32> = a.rule_ids().iter().map(|&r| r as u32).collect();
            assert_eq!(ids, d.rules);
        }
    }
    expected.len()
}

pub const ATTACH: &str = "\
%start S
S -> NP VP : 1.0
VP -> V NP : 0.5
VP -> V NP PP : 0.2
VP -> VP PP : 0.3
NP -> NP PP : 0.2
NP -> D N : 0.5
NP -> N : 0.3
PP -> P NP : 1.0
V -> v : 1.0
D -> d : 1.0
N -> n : 1.0
P -> p : 1.0
";

pub const UNARY: &str = "\
%start S
S -> A : 0.5
S -> S S : 0.2
S -> B : 0.3
A -> B : 0.4
A -> a : 0.6
B -> A : 0.5
B -> a : 0.25
B -> b : 0.25
";

// equal probabilities force ties broken by the rule-sequence key
pub const TIES: &str = "\
%start S
S -> X X : 0.5
S -> X Y : 0.5
X -> x : 0.5
X -> X X : 0.5
Y -> x : 0.5
Y -> y : 0.5
";
