//! Subcategorization pattern extraction and classification.

pub mod classify;
pub mod extract;
pub mod patternset;

pub use classify::{ClassInventory, Classification, SlotConstraint, SubcatClass, UNCLASSIFIABLE};
pub use extract::{detect_passive, extract, is_verbal, predicate_instances};
pub use patternset::{
    build_patternsets, classify_patternsets, read_classified, read_patternsets, sentence_patternsets,
    write_classified, write_patternsets, ClassifiedGroups, ClassifiedInstance, Grouped, Patternset,
};

use crate::error::{format_err, Result};
use crate::ingest::TaggedToken;
use crate::sexpr::Sexpr;

/// A head token, indexed by sentence position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeadRef {
    pub lemma: String,
    pub tag: String,
    pub index: usize,
}

impl HeadRef {
    pub fn of(token: &TaggedToken) -> Self {
        HeadRef {
            lemma: token.head_form(),
            tag: token.tag.clone(),
            index: token.index,
        }
    }

    fn to_sexpr(&self) -> Sexpr {
        Sexpr::list(vec![
            Sexpr::str(&self.lemma),
            Sexpr::atom(self.index.to_string()),
            Sexpr::atom(&self.tag),
        ])
    }

    fn from_sexpr(e: &Sexpr) -> Result<Self> {
        match e.as_list() {
            Some([Sexpr::Str(lemma), idx, Sexpr::Atom(tag)]) => Ok(HeadRef {
                lemma: lemma.clone(),
                tag: tag.clone(),
                index: idx
                    .as_text()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("head index"))?,
            }),
            _ => Err(bad("head")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpRecord {
    pub psubcat: String,
    pub prep: HeadRef,
    pub complements: Vec<HeadRef>,
}

/// One argument position of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// A non-PP argument: its grammar category and lexical head.
    Head { category: String, head: HeadRef },
    Pp(PpRecord),
}

impl Slot {
    pub fn category(&self) -> &str {
        match self {
            Slot::Head { category, .. } => category,
            Slot::Pp(_) => "PP",
        }
    }

    fn to_sexpr(&self) -> Sexpr {
        match self {
            Slot::Head { category, head } => Sexpr::list(vec![Sexpr::atom(category), head.to_sexpr()]),
            Slot::Pp(pp) => {
                let mut comps = vec![];
                comps.extend(pp.complements.iter().map(HeadRef::to_sexpr));
                Sexpr::list(vec![
                    Sexpr::atom("PP"),
                    Sexpr::list(vec![Sexpr::atom("PSUBCAT"), Sexpr::atom(&pp.psubcat)]),
                    pp.prep.to_sexpr(),
                    Sexpr::list(comps),
                ])
            }
        }
    }

    fn from_sexpr(e: &Sexpr) -> Result<Self> {
        match e.as_list() {
            Some([Sexpr::Atom(pp), ps, prep, Sexpr::List(comps)]) if pp == "PP" => {
                let psubcat = match ps.as_list() {
                    Some([Sexpr::Atom(k), Sexpr::Atom(v)]) if k == "PSUBCAT" => v.clone(),
                    _ => return Err(bad("PSUBCAT")),
                };
                Ok(Slot::Pp(PpRecord {
                    psubcat,
                    prep: HeadRef::from_sexpr(prep)?,
                    complements: comps.iter().map(HeadRef::from_sexpr).collect::<Result<_>>()?,
                }))
            }
            Some([Sexpr::Atom(cat), head]) => Ok(Slot::Head {
                category: cat.clone(),
                head: HeadRef::from_sexpr(head)?,
            }),
            _ => Err(bad("slot")),
        }
    }
}

/// The predicate, its VSUBCAT value, the subject and the argument heads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub sentence: usize,
    pub predicate: HeadRef,
    pub vsubcat: String,
    pub subject: Option<HeadRef>,
    pub slots: Vec<Slot>,
    pub passive: bool,
}

impl Pattern {
    pub fn to_sexpr(&self) -> Sexpr {
        Sexpr::list(vec![
            Sexpr::atom("pattern"),
            Sexpr::atom(self.sentence.to_string()),
            self.predicate.to_sexpr(),
            Sexpr::list(vec![Sexpr::atom("VSUBCAT"), Sexpr::atom(&self.vsubcat)]),
            match &self.subject {
                Some(s) => Sexpr::list(vec![Sexpr::atom("subj"), s.to_sexpr()]),
                None => Sexpr::list(vec![Sexpr::atom("subj")]),
            },
            Sexpr::list(vec![
                Sexpr::atom("passive"),
                Sexpr::atom(if self.passive { "yes" } else { "no" }),
            ]),
            Sexpr::list(self.slots.iter().map(Slot::to_sexpr).collect()),
        ])
    }

    pub fn from_sexpr(e: &Sexpr) -> Result<Self> {
        let items = match e.as_list() {
            Some([Sexpr::Atom(h), sent, pred, vs, subj, pas, Sexpr::List(slots)]) if h == "pattern" => {
                (sent, pred, vs, subj, pas, slots)
            }
            _ => return Err(bad("pattern")),
        };
        let sentence = items
            .0
            .as_text()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("sentence id"))?;
        let vsubcat = match items.2.as_list() {
            Some([Sexpr::Atom(k), Sexpr::Atom(v)]) if k == "VSUBCAT" => v.clone(),
            _ => return Err(bad("VSUBCAT")),
        };
        let subject = match items.3.as_list() {
            Some([Sexpr::Atom(k)]) if k == "subj" => None,
            Some([Sexpr::Atom(k), h]) if k == "subj" => Some(HeadRef::from_sexpr(h)?),
            _ => return Err(bad("subj")),
        };
        let passive = match items.4.as_list() {
            Some([Sexpr::Atom(k), Sexpr::Atom(v)]) if k == "passive" => v == "yes",
            _ => return Err(bad("passive")),
        };
        Ok(Pattern {
            sentence,
            predicate: HeadRef::from_sexpr(items.1)?,
            vsubcat,
            subject,
            slots: items.5.iter().map(Slot::from_sexpr).collect::<Result<_>>()?,
            passive,
        })
    }
}

fn bad(what: &str) -> crate::error::Error {
    format_err("patternset", 0, format!("malformed {what}"))
}
