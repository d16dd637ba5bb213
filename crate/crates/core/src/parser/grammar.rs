//! Probabilistic shallow grammar with VSUBCAT/PSUBCAT rule annotations.
//!
//! File format, one directive or rule per line (`#` comments):
//!
//! ```text
//! %start S
//! %vp V1                 # categories whose rules may carry VSUBCAT
//! %pp P1                 # categories whose rules may carry PSUBCAT
//! %vsubcat NONE NP NP_PP
//! %psubcat NP SING
//! S  -> V2 : 1.0
//! V2 -> N2 V1 : 0.9 subj h
//! V1 -> V0 N2 P2 : 0.1 VSUBCAT=NP_PP h arg arg
//! ```
//!
//! Symbols that never appear on a left-hand side are terminals (PoS tags).
//! Slot roles: `h` head, `arg` argument, `adj` adjunct, `subj` subject,
//! `-` anything else. Without roles the first slot is the head.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{format_err, Error, Result};
use crate::ingest::lemma::strip_comment;

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Head,
    Arg,
    Adj,
    Subj,
    Other,
}

impl Role {
    fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "h" => Role::Head,
            "arg" => Role::Arg,
            "adj" => Role::Adj,
            "subj" => Role::Subj,
            "-" => Role::Other,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Head => "h",
            Role::Arg => "arg",
            Role::Adj => "adj",
            Role::Subj => "subj",
            Role::Other => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrammarRule {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub prob: f64,
    pub log_prob: f64,
    pub vsubcat: Option<String>,
    pub psubcat: Option<String>,
    pub roles: Vec<Role>,
    pub head: usize,
}

impl fmt::Display for GrammarRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.lhs, self.rhs.join(" "), self.prob)?;
        if let Some(v) = &self.vsubcat {
            write!(f, " VSUBCAT={v}")?;
        }
        if let Some(p) = &self.psubcat {
            write!(f, " PSUBCAT={p}")?;
        }
        for r in &self.roles {
            write!(f, " {}", r.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    pub start: String,
    rules: Vec<GrammarRule>,
    nonterminals: BTreeSet<String>,
    vsubcat_values: BTreeSet<String>,
    psubcat_values: BTreeSet<String>,
    vp_categories: BTreeSet<String>,
    pp_categories: BTreeSet<String>,
}

impl Grammar {
    pub fn parse(text: &str) -> Result<Grammar> {
        const WHAT: &str = "grammar";
        let mut start = None;
        let mut vp = BTreeSet::new();
        let mut pp = BTreeSet::new();
        let mut vvals = BTreeSet::new();
        let mut pvals = BTreeSet::new();
        let mut raw: Vec<(usize, GrammarRule)> = Vec::new();

        for (ln, line) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = strip_comment(line);
            if line.is_empty() {
                continue;
            }
            if let Some(d) = line.strip_prefix('%') {
                let mut f = d.split_whitespace();
                let name = f.next().unwrap_or("");
                let vals: Vec<String> = f.map(str::to_string).collect();
                match name {
                    "start" if vals.len() == 1 => start = Some(vals[0].clone()),
                    "vp" => vp.extend(vals),
                    "pp" => pp.extend(vals),
                    "vsubcat" => vvals.extend(vals),
                    "psubcat" => pvals.extend(vals),
                    _ => return Err(format_err(WHAT, ln, format!("unknown directive `%{d}`"))),
                }
                continue;
            }
            raw.push((ln, parse_rule(line).map_err(|m| format_err(WHAT, ln, m))?));
        }

        let start = start.ok_or_else(|| format_err(WHAT, 0, "missing %start"))?;
        let nonterminals: BTreeSet<String> = raw.iter().map(|(_, r)| r.lhs.clone()).collect();
        if !nonterminals.contains(&start) {
            return Err(format_err(WHAT, 0, format!("start symbol `{start}` has no rules")));
        }

        for (ln, r) in &raw {
            if let Some(v) = &r.vsubcat {
                if !vvals.contains(v) {
                    return Err(Error::UnknownFeature {
                        feature: "VSUBCAT",
                        value: v.clone(),
                    });
                }
                if !vp.contains(&r.lhs) {
                    return Err(format_err(WHAT, *ln, format!("VSUBCAT on non-VP rule for `{}`", r.lhs)));
                }
            }
            if let Some(p) = &r.psubcat {
                if !pvals.contains(p) {
                    return Err(Error::UnknownFeature {
                        feature: "PSUBCAT",
                        value: p.clone(),
                    });
                }
                if !pp.contains(&r.lhs) {
                    return Err(format_err(WHAT, *ln, format!("PSUBCAT on non-PP rule for `{}`", r.lhs)));
                }
            }
        }

        let mut sums: BTreeMap<String, f64> = BTreeMap::new();
        for (_, r) in &raw {
            *sums.entry(r.lhs.clone()).or_default() += r.prob;
        }
        for (lhs, sum) in &sums {
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::ProbabilitySum {
                    lhs: lhs.clone(),
                    sum: *sum,
                });
            }
        }

        let mut rules: Vec<GrammarRule> = raw
            .into_iter()
            .map(|(_, mut r)| {
                r.prob /= sums[&r.lhs];
                r.log_prob = r.prob.ln();
                r
            })
            .collect();
        rules.sort_by(|a, b| (&a.lhs, &a.rhs, &a.vsubcat, &a.psubcat).cmp(&(&b.lhs, &b.rhs, &b.vsubcat, &b.psubcat)));
        for w in rules.windows(2) {
            if (&w[0].lhs, &w[0].rhs, &w[0].vsubcat, &w[0].psubcat)
                == (&w[1].lhs, &w[1].rhs, &w[1].vsubcat, &w[1].psubcat)
            {
                return Err(format_err(WHAT, 0, format!("duplicate rule `{}`", w[0])));
            }
        }

        Ok(Grammar {
            start,
            rules,
            nonterminals,
            vsubcat_values: vvals,
            psubcat_values: pvals,
            vp_categories: vp,
            pp_categories: pp,
        })
    }

    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    pub fn rule(&self, id: usize) -> Option<&GrammarRule> {
        self.rules.get(id)
    }

    pub fn is_nonterminal(&self, sym: &str) -> bool {
        self.nonterminals.contains(sym)
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    /// Terminal symbols (tags) the grammar mentions.
    pub fn terminals(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.rhs.iter())
            .filter(|s| !self.nonterminals.contains(*s))
            .cloned()
            .collect()
    }

    pub fn vsubcat_values(&self) -> &BTreeSet<String> {
        &self.vsubcat_values
    }

    pub fn psubcat_values(&self) -> &BTreeSet<String> {
        &self.psubcat_values
    }

    pub fn is_vp_category(&self, cat: &str) -> bool {
        self.vp_categories.contains(cat)
    }

    pub fn is_pp_category(&self, cat: &str) -> bool {
        self.pp_categories.contains(cat)
    }
}

fn parse_rule(line: &str) -> std::result::Result<GrammarRule, String> {
    let (lhs, rest) = line
        .split_once("->")
        .ok_or_else(|| format!("expected `->` in `{line}`"))?;
    let lhs = lhs.trim();
    if lhs.is_empty() || lhs.contains(char::is_whitespace) {
        return Err(format!("bad left-hand side in `{line}`"));
    }
    // the probability separator is the last ` : `, so `:` may still be a terminal
    let (rhs, ann) = rest
        .rsplit_once(" : ")
        .ok_or_else(|| format!("expected ` : prob` in `{line}`"))?;
    let rhs: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
    if rhs.is_empty() {
        return Err(format!("empty right-hand side in `{line}`"));
    }
    let mut ann = ann.split_whitespace();
    let prob: f64 = ann
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| format!("missing probability in `{line}`"))?;
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(format!("probability {prob} outside (0,1]"));
    }
    let mut vsubcat = None;
    let mut psubcat = None;
    let mut roles = Vec::new();
    for a in ann {
        if let Some(v) = a.strip_prefix("VSUBCAT=") {
            vsubcat = Some(v.to_string());
        } else if let Some(p) = a.strip_prefix("PSUBCAT=") {
            psubcat = Some(p.to_string());
        } else {
            roles.push(Role::parse(a).ok_or_else(|| format!("unknown annotation `{a}`"))?);
        }
    }
    if vsubcat.is_some() && psubcat.is_some() {
        return Err("a rule cannot carry both VSUBCAT and PSUBCAT".into());
    }
    let head = if roles.is_empty() {
        roles = vec![Role::Other; rhs.len()];
        roles[0] = Role::Head;
        0
    } else {
        if roles.len() != rhs.len() {
            return Err(format!("{} roles for {} slots", roles.len(), rhs.len()));
        }
        let heads: Vec<usize> = (0..roles.len()).filter(|&i| roles[i] == Role::Head).collect();
        if heads.len() != 1 {
            return Err("exactly one head slot required".into());
        }
        heads[0]
    };
    Ok(GrammarRule {
        lhs: lhs.to_string(),
        rhs,
        prob,
        log_prob: prob.ln(),
        vsubcat,
        psubcat,
        roles,
        head,
    })
}
