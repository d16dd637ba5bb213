//! Subcategorization class inventory and pattern classifier.

use std::collections::BTreeSet;
use std::fmt;

use super::{Pattern, Slot};
use crate::error::{format_err, Error, Result};
use crate::ingest::lemma::strip_comment;
use crate::parser::Grammar;

/// Label used for patterns no class accepts.
pub const UNCLASSIFIABLE: &str = "UNCLASSIFIABLE";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SlotConstraint {
    /// Required category; `None` matches any. `PP` matches PP records.
    pub category: Option<String>,
    pub head: Option<String>,
    pub prep: Option<String>,
    pub psubcat: Option<String>,
}

impl SlotConstraint {
    fn specificity(&self) -> usize {
        [&self.category, &self.head, &self.prep, &self.psubcat]
            .iter()
            .filter(|c| c.is_some())
            .count()
    }

    fn matches(&self, slot: &Slot) -> bool {
        if let Some(cat) = &self.category {
            if cat != slot.category() {
                return false;
            }
        }
        match slot {
            Slot::Head { head, .. } => {
                self.prep.is_none()
                    && self.psubcat.is_none()
                    && self.head.as_ref().is_none_or(|h| h.eq_ignore_ascii_case(&head.lemma))
            }
            Slot::Pp(pp) => {
                self.head.as_ref().is_none_or(|h| h.eq_ignore_ascii_case(&pp.prep.lemma))
                    && self.prep.as_ref().is_none_or(|p| p.eq_ignore_ascii_case(&pp.prep.lemma))
                    && self.psubcat.as_ref().is_none_or(|p| p == &pp.psubcat)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubcatClass {
    pub id: String,
    pub name: String,
    pub vsubcat: String,
    /// Required closed-class subject lemma, e.g. dummy `it`.
    pub subject_head: Option<String>,
    pub slots: Vec<SlotConstraint>,
    pub passive_ok: bool,
}

impl SubcatClass {
    pub fn specificity(&self) -> usize {
        self.slots.iter().map(SlotConstraint::specificity).sum::<usize>()
            + usize::from(self.subject_head.is_some())
    }

    pub fn matches(&self, p: &Pattern) -> bool {
        if p.vsubcat != self.vsubcat || p.slots.len() != self.slots.len() {
            return false;
        }
        if p.passive && !self.passive_ok {
            return false;
        }
        if let Some(sh) = &self.subject_head {
            match &p.subject {
                Some(s) if s.lemma.eq_ignore_ascii_case(sh) => {}
                _ => return false,
            }
        }
        self.slots.iter().zip(&p.slots).all(|(c, s)| c.matches(s))
    }

    fn signature(&self) -> (&str, &Option<String>, &[SlotConstraint]) {
        (&self.vsubcat, &self.subject_head, &self.slots)
    }
}

/// Result of classifying one pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    Class(String),
    Unclassifiable,
}

impl Classification {
    pub fn class_id(&self) -> Option<&str> {
        match self {
            Classification::Class(id) => Some(id),
            Classification::Unclassifiable => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class_id().unwrap_or(UNCLASSIFIABLE))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ClassInventory {
    classes: Vec<SubcatClass>,
}

impl ClassInventory {
    pub fn new(classes: Vec<SubcatClass>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut sigs = BTreeSet::new();
        for c in &classes {
            if c.id == UNCLASSIFIABLE || !ids.insert(c.id.clone()) {
                return Err(Error::Invalid(format!("duplicate or reserved class id `{}`", c.id)));
            }
            if !sigs.insert(c.signature()) {
                return Err(Error::Invalid(format!(
                    "class `{}` repeats another class's constraints",
                    c.id
                )));
            }
        }
        Ok(ClassInventory { classes })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut classes = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            classes.push(parse_class(line).map_err(|m| format_err("inventory", ln + 1, m))?);
        }
        ClassInventory::new(classes)
    }

    pub fn classes(&self) -> &[SubcatClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SubcatClass> {
        self.classes.iter().find(|c| c.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    /// Check that every feature value mentioned is declared by the grammar.
    pub fn validate_against(&self, grammar: &Grammar) -> Result<()> {
        for c in &self.classes {
            if !grammar.vsubcat_values().contains(&c.vsubcat) {
                return Err(Error::UnknownFeature {
                    feature: "VSUBCAT",
                    value: c.vsubcat.clone(),
                });
            }
            for s in &c.slots {
                if let Some(p) = &s.psubcat {
                    if !grammar.psubcat_values().contains(p) {
                        return Err(Error::UnknownFeature {
                            feature: "PSUBCAT",
                            value: p.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The most specific matching class; ties go to the earliest class.
    pub fn classify(&self, pattern: &Pattern) -> Classification {
        let mut best: Option<&SubcatClass> = None;
        for c in &self.classes {
            if c.matches(pattern) && best.is_none_or(|b| c.specificity() > b.specificity()) {
                best = Some(c);
            }
        }
        best.map_or(Classification::Unclassifiable, |c| Classification::Class(c.id.clone()))
    }
}

fn parse_class(line: &str) -> std::result::Result<SubcatClass, String> {
    let mut f = line.split_whitespace();
    let id = f.next().ok_or("missing class id")?.to_string();
    let name = f.next().ok_or("missing class name")?.to_string();
    let mut vsubcat = None;
    let mut subject_head = None;
    let mut slots = Vec::new();
    let mut passive_ok = false;
    for tok in f {
        if let Some(v) = tok.strip_prefix("VSUBCAT=") {
            vsubcat = Some(v.to_string());
        } else if tok == "passive-ok" {
            passive_ok = true;
        } else if let Some(rest) = tok.strip_prefix("subj") {
            let c = parse_constraint("*", rest)?;
            subject_head = Some(c.head.ok_or("subject constraint needs head=")?);
        } else if let Some(rest) = tok.strip_prefix("slot:") {
            let (cat, cons) = match rest.find('[') {
                Some(p) => (&rest[..p], &rest[p..]),
                None => (rest, ""),
            };
            slots.push(parse_constraint(cat, cons)?);
        } else {
            return Err(format!("unrecognized field `{tok}`"));
        }
    }
    Ok(SubcatClass {
        id,
        name,
        vsubcat: vsubcat.ok_or("missing VSUBCAT=")?,
        subject_head,
        slots,
        passive_ok,
    })
}

/// `cat` plus a constraint suffix like `[prep=to,psubcat=NP]` or `[prep=to][psubcat=NP]`.
fn parse_constraint(cat: &str, cons: &str) -> std::result::Result<SlotConstraint, String> {
    if cat.is_empty() {
        return Err("empty slot category".into());
    }
    let mut c = SlotConstraint {
        category: (cat != "*").then(|| cat.to_string()),
        ..SlotConstraint::default()
    };
    let mut rest = cons;
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('[')
            .and_then(|r| r.find(']').map(|e| (&r[..e], &r[e + 1..])))
            .ok_or_else(|| format!("bad constraint `{cons}`"))?;
        for kv in body.0.split([',', '|']) {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad constraint `{kv}`"))?;
            let slot = match k {
                "head" => &mut c.head,
                "prep" => &mut c.prep,
                "psubcat" => &mut c.psubcat,
                _ => return Err(format!("unknown constraint `{k}`")),
            };
            *slot = Some(v.to_string());
        }
        rest = body.1;
    }
    Ok(c)
}
