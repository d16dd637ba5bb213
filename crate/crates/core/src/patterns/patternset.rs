//! Per-instance patternsets, grouped by predicate lemma.

use std::collections::{BTreeMap, BTreeSet};

use super::classify::{ClassInventory, Classification, UNCLASSIFIABLE};
use super::extract::{extract, predicate_instances};
use super::Pattern;
use crate::error::{format_err, Result};
use crate::parser::SentenceParses;
use crate::sexpr::{self, Sexpr};

/// Patterns for one predicate instance across the ranked parses of its sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Patternset {
    pub predicate: String,
    pub sentence: usize,
    pub index: usize,
    pub selected: Pattern,
    pub selected_rank: usize,
    /// Patterns from lower-ranked parses, with their ranks.
    pub candidates: Vec<(usize, Pattern)>,
}

impl Patternset {
    pub fn classify(&self, inventory: &ClassInventory) -> Classification {
        inventory.classify(&self.selected)
    }

    pub fn to_sexpr(&self) -> Sexpr {
        let mut items = vec![
            Sexpr::atom("patternset"),
            Sexpr::str(&self.predicate),
            Sexpr::atom(self.sentence.to_string()),
            Sexpr::atom(self.index.to_string()),
            Sexpr::list(vec![
                Sexpr::atom("selected"),
                Sexpr::atom(self.selected_rank.to_string()),
                self.selected.to_sexpr(),
            ]),
        ];
        items.extend(self.candidates.iter().map(|(r, p)| {
            Sexpr::list(vec![Sexpr::atom("candidate"), Sexpr::atom(r.to_string()), p.to_sexpr()])
        }));
        Sexpr::list(items)
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Self> {
        let bad = |m: &str| format_err("patternset", 0, m.to_string());
        let num = |e: &Sexpr| e.as_text().and_then(|s| s.parse::<usize>().ok());
        let ranked = |e: &Sexpr, head: &str| -> Result<(usize, Pattern)> {
            match e.as_list() {
                Some([Sexpr::Atom(h), r, p]) if h == head => {
                    Ok((num(r).ok_or_else(|| bad("bad rank"))?, Pattern::from_sexpr(p)?))
                }
                _ => Err(bad(&format!("expected ({head} RANK PATTERN)"))),
            }
        };
        match e.as_list() {
            Some([Sexpr::Atom(h), Sexpr::Str(pred), sent, idx, sel, rest @ ..]) if h == "patternset" => {
                let (selected_rank, selected) = ranked(sel, "selected")?;
                Ok(Patternset {
                    predicate: pred.clone(),
                    sentence: num(sent).ok_or_else(|| bad("bad sentence id"))?,
                    index: num(idx).ok_or_else(|| bad("bad token index"))?,
                    selected,
                    selected_rank,
                    candidates: rest.iter().map(|c| ranked(c, "candidate")).collect::<Result<_>>()?,
                })
            }
            _ => Err(bad("expected (patternset ...)")),
        }
    }
}

pub type Grouped = BTreeMap<String, Vec<Patternset>>;

/// One patternset per predicate instance that yields a pattern in some parse.
/// The selected pattern comes from the best-ranked such parse. With a
/// non-empty `predicates` list only those lemmas are kept.
pub fn build_patternsets(parses: &[SentenceParses], predicates: &[String]) -> Result<Grouped> {
    let wanted: BTreeSet<String> = predicates.iter().map(|p| p.to_lowercase()).collect();
    let mut grouped = Grouped::new();
    for sp in parses {
        for ps in sentence_patternsets(sp)? {
            if wanted.is_empty() || wanted.contains(&ps.predicate) {
                grouped.entry(ps.predicate.clone()).or_default().push(ps);
            }
        }
    }
    for sets in grouped.values_mut() {
        sets.sort_by_key(|p| (p.sentence, p.index));
    }
    Ok(grouped)
}

/// Patternsets for every predicate instance of one sentence, by token index.
pub fn sentence_patternsets(sp: &SentenceParses) -> Result<Vec<Patternset>> {
    let positions: BTreeSet<usize> = sp.analyses.iter().flat_map(predicate_instances).collect();
    let mut out = Vec::new();
    for idx in positions {
        let mut found: Vec<(usize, Pattern)> = Vec::new();
        for a in &sp.analyses {
            if let Some(p) = extract(a, idx, sp.sentence)? {
                found.push((a.rank, p));
            }
        }
        found.sort_by_key(|(r, _)| *r);
        let mut it = found.into_iter();
        if let Some((rank, selected)) = it.next() {
            out.push(Patternset {
                predicate: selected.predicate.lemma.clone(),
                sentence: sp.sentence,
                index: idx,
                selected,
                selected_rank: rank,
                candidates: it.collect(),
            });
        }
    }
    Ok(out)
}

pub fn write_patternsets(grouped: &Grouped) -> String {
    let mut out = String::new();
    for sets in grouped.values() {
        for ps in sets {
            out.push_str(&ps.to_sexpr().to_string());
            out.push('\n');
        }
    }
    out
}

pub fn read_patternsets(text: &str) -> Result<Grouped> {
    let mut grouped = Grouped::new();
    for e in sexpr::parse_all(text)? {
        let ps = Patternset::from_sexpr(&e)?;
        grouped.entry(ps.predicate.clone()).or_default().push(ps);
    }
    for sets in grouped.values_mut() {
        sets.sort_by_key(|p| (p.sentence, p.index));
    }
    Ok(grouped)
}

/// Classification of one patternset's selected pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassifiedInstance {
    pub predicate: String,
    pub sentence: usize,
    pub index: usize,
    pub class: Classification,
}

pub type ClassifiedGroups = BTreeMap<String, Vec<ClassifiedInstance>>;

pub fn classify_patternsets(grouped: &Grouped, inventory: &ClassInventory) -> ClassifiedGroups {
    grouped
        .iter()
        .map(|(lemma, sets)| {
            let v = sets
                .iter()
                .map(|ps| ClassifiedInstance {
                    predicate: lemma.clone(),
                    sentence: ps.sentence,
                    index: ps.index,
                    class: ps.classify(inventory),
                })
                .collect();
            (lemma.clone(), v)
        })
        .collect()
}

/// Tab-separated `lemma sentence index class` lines.
pub fn write_classified(groups: &ClassifiedGroups) -> String {
    let mut out = String::new();
    for inst in groups.values().flatten() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            inst.predicate, inst.sentence, inst.index, inst.class
        ));
    }
    out
}

pub fn read_classified(text: &str) -> Result<ClassifiedGroups> {
    let mut groups = ClassifiedGroups::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: &str| format_err("classified patternsets", ln + 1, m.to_string());
        let f: Vec<&str> = line.split('\t').collect();
        let [lemma, sent, idx, class] = f[..] else {
            return Err(err("expected 4 tab-separated fields"));
        };
        let inst = ClassifiedInstance {
            predicate: lemma.to_string(),
            sentence: sent.parse().map_err(|_| err("bad sentence id"))?,
            index: idx.parse().map_err(|_| err("bad token index"))?,
            class: if class == UNCLASSIFIABLE {
                Classification::Unclassifiable
            } else {
                Classification::Class(class.to_string())
            },
        };
        groups.entry(inst.predicate.clone()).or_default().push(inst);
    }
    for v in groups.values_mut() {
        v.sort();
    }
    Ok(groups)
}
