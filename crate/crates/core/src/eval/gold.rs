//! Gold-standard lexicon entries.
//!
//! ```text
//! VERB give
//! CLASSES NP_NP NP_PP-to PRT-up
//! RANK NP_NP NP_PP-to=PRT-up
//! TOKENS NP_NP 31
//! TOKENS NP_PP-to 9
//! ```
//!
//! `RANK` lists classes most frequent first; `=` joins tied classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{format_err, Result};
use crate::ingest::lemma::strip_comment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEntry {
    pub verb: String,
    pub classes: BTreeSet<String>,
    /// Tie groups, most frequent first.
    pub ranking: Option<Vec<Vec<String>>>,
    /// Exemplar counts per gold class.
    pub tokens: BTreeMap<String, u64>,
}

impl GoldEntry {
    pub fn new(verb: impl Into<String>) -> Self {
        GoldEntry {
            verb: verb.into(),
            classes: BTreeSet::new(),
            ranking: None,
            tokens: BTreeMap::new(),
        }
    }
}

pub fn read_gold(text: &str) -> Result<BTreeMap<String, GoldEntry>> {
    const WHAT: &str = "gold";
    let mut out = BTreeMap::new();
    let mut cur: Option<GoldEntry> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |m: String| format_err(WHAT, ln + 1, m);
        let mut f = line.split_whitespace();
        let key = f.next().unwrap();
        let rest: Vec<&str> = f.collect();
        if key == "VERB" {
            let [verb] = rest[..] else {
                return Err(err("expected `VERB lemma`".into()));
            };
            if let Some(e) = cur.take() {
                finish(e, &mut out).map_err(&err)?;
            }
            cur = Some(GoldEntry::new(verb));
            continue;
        }
        let e = cur.as_mut().ok_or_else(|| err(format!("`{key}` before VERB")))?;
        match key {
            "CLASSES" => e.classes.extend(rest.iter().map(|s| s.to_string())),
            "RANK" => {
                if e.ranking.is_some() {
                    return Err(err("second RANK line".into()));
                }
                e.ranking = Some(
                    rest.iter()
                        .map(|g| g.split('=').map(str::to_string).collect())
                        .collect(),
                );
            }
            "TOKENS" => match rest[..] {
                [class, n] => {
                    let n: u64 = n.parse().map_err(|_| err(format!("bad count `{n}`")))?;
                    *e.tokens.entry(class.to_string()).or_default() += n;
                }
                _ => return Err(err("expected `TOKENS class count`".into())),
            },
            _ => return Err(err(format!("unknown keyword `{key}`"))),
        }
    }
    if let Some(e) = cur.take() {
        finish(e, &mut out).map_err(|m| format_err(WHAT, 0, m))?;
    }
    Ok(out)
}

fn finish(e: GoldEntry, out: &mut BTreeMap<String, GoldEntry>) -> std::result::Result<(), String> {
    if let Some(r) = &e.ranking {
        let mut seen = BTreeSet::new();
        for c in r.iter().flatten() {
            if !e.classes.contains(c) {
                return Err(format!("{}: ranked class {c} is not a gold class", e.verb));
            }
            if !seen.insert(c) {
                return Err(format!("{}: class {c} ranked twice", e.verb));
            }
        }
    }
    if out.contains_key(&e.verb) {
        return Err(format!("duplicate entry for {}", e.verb));
    }
    out.insert(e.verb.clone(), e);
    Ok(())
}

pub fn write_gold(entries: &BTreeMap<String, GoldEntry>) -> String {
    let mut out = String::new();
    for e in entries.values() {
        let _ = writeln!(out, "VERB {}", e.verb);
        let classes: Vec<&str> = e.classes.iter().map(String::as_str).collect();
        let _ = writeln!(out, "CLASSES {}", classes.join(" "));
        if let Some(r) = &e.ranking {
            let groups: Vec<String> = r.iter().map(|g| g.join("=")).collect();
            let _ = writeln!(out, "RANK {}", groups.join(" "));
        }
        for (c, n) in &e.tokens {
            let _ = writeln!(out, "TOKENS {c} {n}");
        }
    }
    out
}
