//! Locate the subanalysis around a predicate and read off its pattern.

use super::{HeadRef, Pattern, PpRecord, Slot};
use crate::error::{Error, Result};
use crate::parser::{Analysis, NodeKind, Role};

/// Auxiliary lemmas that license a passive reading of a past participle.
pub const PASSIVE_AUXILIARIES: [&str; 2] = ["be", "get"];
const VERBAL_PREFIX: &str = "VV";
const PARTICIPLE_TAG: &str = "VVN";
const AGENT_PREP: &str = "by";

pub fn is_verbal(tag: &str) -> bool {
    tag.starts_with(VERBAL_PREFIX)
}

/// Sentence positions of lexical verbs in the analysis.
pub fn predicate_instances(analysis: &Analysis) -> Vec<usize> {
    analysis
        .leaves()
        .into_iter()
        .filter(|t| is_verbal(&t.tag))
        .map(|t| t.index)
        .collect()
}

struct Located {
    vp: usize,
    subject: Option<usize>,
    /// Adjuncts met on the head chain above the VP.
    adjuncts: Vec<usize>,
    passive: bool,
}

fn locate(a: &Analysis, predicate: usize) -> Result<Option<Located>> {
    let len = a.len();
    if predicate >= len {
        return Err(Error::IndexOutOfRange { index: predicate, len });
    }
    let leaf = a.leaf_node(predicate).expect("every position has a leaf");
    let tag = match &a.nodes[leaf].kind {
        NodeKind::Leaf { token, .. } => token.tag.clone(),
        _ => unreachable!(),
    };
    if !is_verbal(&tag) {
        return Ok(None);
    }

    // lowest projection of the predicate carrying VSUBCAT
    let mut cur = leaf;
    let vp = loop {
        if a.nodes[cur].vsubcat().is_some() {
            break cur;
        }
        match a.nodes[cur].parent {
            Some(p) if a.nodes[p].head_token == predicate => cur = p,
            _ => return Ok(None),
        }
    };

    let passive = tag.starts_with(PARTICIPLE_TAG)
        && a.nodes[vp].role == Role::Arg
        && a.nodes[vp].parent.is_some_and(|p| {
            let n = &a.nodes[p];
            n.vsubcat().is_none()
                && n.label == a.nodes[vp].label
                && a.token(n.head_token)
                    .is_some_and(|t| PASSIVE_AUXILIARIES.contains(&t.head_form().to_lowercase().as_str()))
        });

    // Climb the head chain (and through auxiliary VPs) to the clause's subject.
    let mut subject = None;
    let mut adjuncts = Vec::new();
    let mut cur = vp;
    while let Some(p) = a.nodes[cur].parent {
        let parent = &a.nodes[p];
        let is_head = parent.head_child() == Some(cur);
        let via_aux = !is_head
            && a.nodes[cur].role == Role::Arg
            && a.nodes[cur].label == a.nodes[vp].label
            && parent.label == a.nodes[vp].label
            && parent.vsubcat().is_none();
        if !is_head && !via_aux {
            break;
        }
        for &c in &parent.children {
            match a.nodes[c].role {
                Role::Subj if subject.is_none() => subject = Some(c),
                Role::Adj if c != cur => adjuncts.push(c),
                _ => {}
            }
        }
        cur = p;
        if subject.is_some() {
            break;
        }
    }
    // adjuncts Chomsky-adjoined to the clause itself
    while let Some(p) = a.nodes[cur].parent {
        let parent = &a.nodes[p];
        if parent.head_child() != Some(cur) || parent.label != a.nodes[cur].label {
            break;
        }
        adjuncts.extend(parent.children.iter().filter(|&&c| a.nodes[c].role == Role::Adj));
        cur = p;
    }

    Ok(Some(Located {
        vp,
        subject,
        adjuncts,
        passive,
    }))
}

fn head_ref(a: &Analysis, node: usize) -> HeadRef {
    HeadRef::of(a.token(a.nodes[node].head_token).expect("head token is a leaf"))
}

/// The PSUBCAT-bearing node on `node`'s head chain, if any.
fn pp_node(a: &Analysis, node: usize) -> Option<usize> {
    let mut cur = node;
    loop {
        if a.nodes[cur].psubcat().is_some() {
            return Some(cur);
        }
        cur = a.nodes[cur].head_child()?;
    }
}

fn slot_of(a: &Analysis, node: usize) -> Slot {
    match pp_node(a, node) {
        Some(pp) => {
            let n = &a.nodes[pp];
            Slot::Pp(PpRecord {
                psubcat: n.psubcat().unwrap().to_string(),
                prep: head_ref(a, pp),
                complements: n
                    .children
                    .iter()
                    .filter(|&&c| a.nodes[c].role == Role::Arg)
                    .map(|&c| head_ref(a, c))
                    .collect(),
            })
        }
        None => Slot::Head {
            category: a.nodes[node].label.clone(),
            head: head_ref(a, node),
        },
    }
}

fn agent_of(slot: &Slot) -> Option<HeadRef> {
    match slot {
        Slot::Pp(pp) if pp.prep.lemma.eq_ignore_ascii_case(AGENT_PREP) => pp.complements.first().cloned(),
        _ => None,
    }
}

/// VSUBCAT of the active counterpart: the surface subject becomes the first object.
pub fn deep_vsubcat(surface: &str) -> String {
    if surface == "NONE" {
        "NP".to_string()
    } else {
        format!("NP_{surface}")
    }
}

/// Whether the predicate at `predicate` is a passive participle governed by
/// a `be`/`get` auxiliary.
pub fn detect_passive(analysis: &Analysis, predicate: usize) -> Result<bool> {
    Ok(locate(analysis, predicate)?.is_some_and(|l| l.passive))
}

/// Pattern for the predicate at sentence position `predicate`, or `None`
/// when the analysis has no VSUBCAT-bearing projection of it. Passive
/// clauses are mapped to their active counterparts.
pub fn extract(analysis: &Analysis, predicate: usize, sentence: usize) -> Result<Option<Pattern>> {
    let Some(loc) = locate(analysis, predicate)? else {
        return Ok(None);
    };
    let a = analysis;
    let vp = &a.nodes[loc.vp];
    let mut slots: Vec<Slot> = vp
        .children
        .iter()
        .filter(|&&c| a.nodes[c].role == Role::Arg)
        .map(|&c| slot_of(a, c))
        .collect();
    let mut subject = loc.subject.map(|s| head_ref(a, s));
    let mut vsubcat = vp.vsubcat().unwrap().to_string();

    if loc.passive {
        let mut agent = None;
        if let Some(pos) = slots.iter().position(|s| agent_of(s).is_some()) {
            agent = agent_of(&slots.remove(pos));
            vsubcat = match vsubcat.as_str() {
                "PP" => "NONE".to_string(),
                v => v.strip_suffix("_PP").unwrap_or(v).to_string(),
            };
        }
        if agent.is_none() {
            agent = loc
                .adjuncts
                .iter()
                .map(|&c| slot_of(a, c))
                .find_map(|s| agent_of(&s));
        }
        if let Some(s) = loc.subject {
            slots.insert(
                0,
                Slot::Head {
                    category: a.nodes[s].label.clone(),
                    head: head_ref(a, s),
                },
            );
        }
        vsubcat = deep_vsubcat(&vsubcat);
        subject = agent;
    }

    Ok(Some(Pattern {
        sentence,
        predicate: head_ref(a, a.leaf_node(predicate).unwrap()),
        vsubcat,
        subject,
        slots,
        passive: loc.passive,
    }))
}
