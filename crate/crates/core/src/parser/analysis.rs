//! Parse trees returned by the chart parser.

use std::fmt::Write as _;

use super::grammar::{Grammar, Role};
use crate::error::{format_err, Result};
use crate::ingest::TaggedToken;
use crate::sexpr::Sexpr;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Phrase {
        rule: usize,
        vsubcat: Option<String>,
        psubcat: Option<String>,
        /// Position of the head among `children`.
        head_child: usize,
    },
    Leaf {
        token: TaggedToken,
        /// Tag log-odds against the tagger's first choice; 0 for the first choice.
        penalty: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Category for phrases, tag for leaves.
    pub label: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Role in the parent's rule; `Other` at the root.
    pub role: Role,
    pub start: usize,
    pub end: usize,
    /// Sentence index of the lexical head.
    pub head_token: usize,
    pub kind: NodeKind,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn vsubcat(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Phrase { vsubcat, .. } => vsubcat.as_deref(),
            _ => None,
        }
    }

    pub fn psubcat(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Phrase { psubcat, .. } => psubcat.as_deref(),
            _ => None,
        }
    }

    pub fn head_child(&self) -> Option<usize> {
        match &self.kind {
            NodeKind::Phrase { head_child, .. } => Some(self.children[*head_child]),
            _ => None,
        }
    }
}

/// A complete derivation stored as a preorder node arena (root at 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub nodes: Vec<Node>,
    /// Log score: rule log-probabilities plus leaf tag penalties.
    pub score: f64,
    /// 1-based rank among the sentence's analyses.
    pub rank: usize,
}

/// Tree description used to build an arena.
pub(crate) enum TreeSpec {
    Phrase { rule: usize, children: Vec<TreeSpec> },
    Leaf { token: TaggedToken, penalty: f64 },
}

impl Analysis {
    pub(crate) fn build(spec: &TreeSpec, grammar: &Grammar, score: f64, rank: usize) -> Analysis {
        let mut nodes = Vec::new();
        push_node(spec, grammar, None, Role::Other, &mut nodes);
        Analysis { nodes, score, rank }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> Vec<&TaggedToken> {
        self.nodes
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Leaf { token, .. } => Some(token),
                _ => None,
            })
            .collect()
    }

    /// Node id of the leaf for sentence position `index`.
    pub fn leaf_node(&self, index: usize) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| matches!(&n.kind, NodeKind::Leaf { token, .. } if token.index == index))
    }

    pub fn token(&self, index: usize) -> Option<&TaggedToken> {
        self.leaf_node(index).and_then(|id| match &self.nodes[id].kind {
            NodeKind::Leaf { token, .. } => Some(token),
            _ => None,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes[0].end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rule ids used, in preorder.
    pub fn rule_ids(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Phrase { rule, .. } => Some(rule),
                _ => None,
            })
            .collect()
    }

    /// Score recomputed from the grammar's rule probabilities and leaf penalties.
    pub fn recompute_score(&self, grammar: &Grammar) -> f64 {
        self.nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Phrase { rule, .. } => grammar.rule(*rule).map_or(f64::NAN, |r| r.log_prob),
                NodeKind::Leaf { penalty, .. } => *penalty,
            })
            .sum()
    }

    /// Phrase spans `(start, end)` in preorder, including unary duplicates.
    pub fn spans(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .filter(|n| !n.is_leaf())
            .map(|n| (n.start, n.end))
            .collect()
    }

    pub fn to_sexpr(&self) -> Sexpr {
        Sexpr::list(vec![
            Sexpr::atom("analysis"),
            Sexpr::atom(self.rank.to_string()),
            Sexpr::atom(self.score.to_string()),
            self.node_sexpr(0),
        ])
    }

    fn node_sexpr(&self, id: usize) -> Sexpr {
        let n = &self.nodes[id];
        match &n.kind {
            NodeKind::Leaf { token, penalty } => Sexpr::list(vec![
                Sexpr::atom(&n.label),
                Sexpr::str(&token.surface),
                Sexpr::str(&token.lemma),
                Sexpr::atom(token.index.to_string()),
                Sexpr::atom(penalty.to_string()),
            ]),
            NodeKind::Phrase {
                rule,
                vsubcat,
                psubcat,
                ..
            } => {
                let mut items = vec![Sexpr::atom(&n.label), Sexpr::atom(format!("@{rule}"))];
                if let Some(v) = vsubcat {
                    items.push(Sexpr::atom(format!("VSUBCAT={v}")));
                }
                if let Some(p) = psubcat {
                    items.push(Sexpr::atom(format!("PSUBCAT={p}")));
                }
                items.extend(n.children.iter().map(|&c| self.node_sexpr(c)));
                Sexpr::list(items)
            }
        }
    }

    /// Read an `(analysis RANK SCORE TREE)` form, resolving rule ids against `grammar`.
    pub fn from_sexpr(e: &Sexpr, grammar: &Grammar) -> Result<Analysis> {
        const WHAT: &str = "analysis";
        let items = match e.as_list() {
            Some([Sexpr::Atom(h), rank, score, tree]) if h == "analysis" => (rank, score, tree),
            _ => return Err(format_err(WHAT, 0, "expected (analysis RANK SCORE TREE)")),
        };
        let rank: usize = items
            .0
            .as_text()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(WHAT, 0, "bad rank"))?;
        let score: f64 = items
            .1
            .as_text()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(WHAT, 0, "bad score"))?;
        let spec = spec_from_sexpr(items.2, grammar)?;
        Ok(Analysis::build(&spec, grammar, score, rank))
    }

    /// Indented layout with `lemma_TAG` leaves and feature annotations.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_node(0, 0, &mut out);
        out
    }

    fn pretty_node(&self, id: usize, depth: usize, out: &mut String) {
        let n = &self.nodes[id];
        match &n.kind {
            NodeKind::Leaf { token, .. } => {
                let _ = write!(out, "{}_{}", token.head_form(), n.label);
            }
            NodeKind::Phrase { vsubcat, psubcat, .. } => {
                let _ = write!(out, "({}", n.label);
                if let Some(v) = vsubcat {
                    let _ = write!(out, " [VSUBCAT {v}]");
                }
                if let Some(p) = psubcat {
                    let _ = write!(out, " [PSUBCAT {p}]");
                }
                let flat = n.children.iter().all(|&c| self.nodes[c].is_leaf());
                for &c in &n.children {
                    if flat {
                        out.push(' ');
                    } else {
                        out.push('\n');
                        out.push_str(&"   ".repeat(depth + 1));
                    }
                    self.pretty_node(c, depth + 1, out);
                }
                out.push(')');
            }
        }
    }
}

fn spec_from_sexpr(e: &Sexpr, grammar: &Grammar) -> Result<TreeSpec> {
    const WHAT: &str = "analysis tree";
    let items = e
        .as_list()
        .ok_or_else(|| format_err(WHAT, 0, "expected a list"))?;
    match items {
        [Sexpr::Atom(tag), Sexpr::Str(surface), Sexpr::Str(lemma), idx, pen] => {
            let index: usize = idx
                .as_text()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format_err(WHAT, 0, "bad leaf index"))?;
            let penalty: f64 = pen
                .as_text()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format_err(WHAT, 0, "bad leaf penalty"))?;
            Ok(TreeSpec::Leaf {
                token: TaggedToken::new(index, surface.clone(), tag.clone()).with_lemma(lemma.clone()),
                penalty,
            })
        }
        [Sexpr::Atom(cat), Sexpr::Atom(id), rest @ ..] if id.starts_with('@') => {
            let rule: usize = id[1..]
                .parse()
                .map_err(|_| format_err(WHAT, 0, format!("bad rule reference `{id}`")))?;
            let r = grammar
                .rule(rule)
                .ok_or_else(|| format_err(WHAT, 0, format!("rule {rule} not in grammar")))?;
            if &r.lhs != cat {
                return Err(format_err(WHAT, 0, format!("rule {rule} is `{}`, not `{cat}`", r.lhs)));
            }
            let children = rest
                .iter()
                .filter(|c| c.as_list().is_some())
                .map(|c| spec_from_sexpr(c, grammar))
                .collect::<Result<Vec<_>>>()?;
            if children.len() != r.rhs.len() {
                return Err(format_err(WHAT, 0, format!("rule {rule} expects {} children", r.rhs.len())));
            }
            Ok(TreeSpec::Phrase { rule, children })
        }
        _ => Err(format_err(WHAT, 0, format!("unrecognized node `{e}`"))),
    }
}

fn push_node(
    spec: &TreeSpec,
    grammar: &Grammar,
    parent: Option<usize>,
    role: Role,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    match spec {
        TreeSpec::Leaf { token, penalty } => {
            nodes.push(Node {
                label: token.tag.clone(),
                parent,
                children: Vec::new(),
                role,
                start: token.index,
                end: token.index + 1,
                head_token: token.index,
                kind: NodeKind::Leaf {
                    token: token.clone(),
                    penalty: *penalty,
                },
            });
        }
        TreeSpec::Phrase { rule, children } => {
            let r = grammar.rule(*rule).expect("rule id validated by caller");
            nodes.push(Node {
                label: r.lhs.clone(),
                parent,
                children: Vec::new(),
                role,
                start: 0,
                end: 0,
                head_token: 0,
                kind: NodeKind::Phrase {
                    rule: *rule,
                    vsubcat: r.vsubcat.clone(),
                    psubcat: r.psubcat.clone(),
                    head_child: r.head,
                },
            });
            let kids: Vec<usize> = children
                .iter()
                .zip(&r.roles)
                .map(|(c, &role)| push_node(c, grammar, Some(id), role, nodes))
                .collect();
            let start = nodes[kids[0]].start;
            let end = nodes[*kids.last().unwrap()].end;
            let head_token = nodes[kids[r.head]].head_token;
            let n = &mut nodes[id];
            n.children = kids;
            n.start = start;
            n.end = end;
            n.head_token = head_token;
        }
    }
    id
}
