//! Synthetic tagged corpora with known subcategorization labels.
//!
//! A template file has three kinds of lines:
//!
//! ```text
//! INFL give give gives gave given giving     # lemma VV0 VVZ VVD VVN VVG
//! FILL NP the_AT book_NN1 | a_AT1 letter_NN1  # alternatives split on `|`
//! T NP_PP-to {SUBJ} {V:VVD} {NP} to_II {OBJ} ._.
//! ```
//!
//! `{V:TAG}` is the predicate in the inflection for TAG, `{NAME}` draws a
//! filler and anything else is a literal `word_TAG` token.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gold::GoldEntry;
use crate::error::{format_err, Error, Result};
use crate::ingest::corpus::{write_tagged_corpus, Sentence, TaggedToken};
use crate::ingest::lemma::strip_comment;
use crate::parser::{parse, Analysis, Grammar};
use crate::patterns::{extract, ClassInventory};

const VERB_TAGS: [&str; 5] = ["VV0", "VVZ", "VVD", "VVN", "VVG"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Verb(String),
    Fill(String),
    Word(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub class: String,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Default)]
pub struct Templates {
    /// lemma -> tag -> form
    pub inflections: BTreeMap<String, BTreeMap<String, String>>,
    fillers: BTreeMap<String, Vec<Vec<(String, String)>>>,
    templates: Vec<Template>,
}

fn split_word(tok: &str) -> Option<(String, String)> {
    let (w, t) = tok.rsplit_once('_')?;
    (!w.is_empty() && !t.is_empty()).then(|| (w.to_string(), t.to_string()))
}

impl Templates {
    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "templates";
        let mut t = Templates::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |m: String| format_err(WHAT, ln + 1, m);
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[0] {
                "INFL" => {
                    let [_, lemma, forms @ ..] = &f[..] else { unreachable!() };
                    if forms.len() != VERB_TAGS.len() {
                        return Err(err("expected lemma plus VV0 VVZ VVD VVN VVG forms".into()));
                    }
                    let row = VERB_TAGS
                        .iter()
                        .zip(forms)
                        .map(|(tag, form)| (tag.to_string(), form.to_string()))
                        .collect();
                    t.inflections.insert(lemma.to_string(), row);
                }
                "FILL" if f.len() >= 3 => {
                    let alts = f[2..]
                        .join(" ")
                        .split('|')
                        .map(|alt| {
                            alt.split_whitespace()
                                .map(|w| split_word(w).ok_or_else(|| err(format!("bad token `{w}`"))))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if alts.iter().any(Vec::is_empty) {
                        return Err(err("empty filler alternative".into()));
                    }
                    t.fillers.entry(f[1].to_string()).or_default().extend(alts);
                }
                "T" if f.len() >= 3 => {
                    let pieces = f[2..]
                        .iter()
                        .map(|tok| {
                            if let Some(inner) = tok.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
                                match inner.strip_prefix("V:") {
                                    Some(tag) if VERB_TAGS.contains(&tag) => Ok(Piece::Verb(tag.to_string())),
                                    Some(tag) => Err(err(format!("unknown verb form {tag}"))),
                                    None => Ok(Piece::Fill(inner.to_string())),
                                }
                            } else {
                                split_word(tok)
                                    .map(|(w, t)| Piece::Word(w, t))
                                    .ok_or_else(|| err(format!("bad token `{tok}`")))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if pieces.iter().filter(|p| matches!(p, Piece::Verb(_))).count() != 1 {
                        return Err(err("a template needs exactly one {V:TAG}".into()));
                    }
                    t.templates.push(Template {
                        class: f[1].to_string(),
                        pieces,
                    });
                }
                _ => return Err(err(format!("unrecognized line `{line}`"))),
            }
        }
        for tpl in &t.templates {
            for p in &tpl.pieces {
                if let Piece::Fill(name) = p {
                    if !t.fillers.contains_key(name) {
                        return Err(format_err(WHAT, 0, format!("undefined filler {{{name}}}")));
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn templates_for<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a Template> + 'a {
        self.templates.iter().filter(move |t| t.class == class)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn classes(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.templates.iter().map(|t| t.class.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Expand with the given filler choices; returns the tokens and the verb position.
    fn expand(&self, tpl: &Template, lemma: &str, choose: &mut dyn FnMut(usize) -> usize) -> Result<(Sentence, usize)> {
        let forms = self
            .inflections
            .get(lemma)
            .ok_or_else(|| Error::Invalid(format!("no inflections for verb `{lemma}`")))?;
        let mut out = Vec::new();
        let mut verb = 0;
        let push = |out: &mut Sentence, w: &str, t: &str| {
            let i = out.len();
            out.push(TaggedToken::new(i, w, t));
        };
        for p in &tpl.pieces {
            match p {
                Piece::Word(w, t) => push(&mut out, w, t),
                Piece::Verb(tag) => {
                    verb = out.len();
                    push(&mut out, &forms[tag], tag);
                    out[verb].lemma = lemma.to_string();
                }
                Piece::Fill(name) => {
                    let alts = &self.fillers[name];
                    for (w, t) in &alts[choose(alts.len())] {
                        push(&mut out, w, t);
                    }
                }
            }
        }
        Ok((out, verb))
    }

    /// Classes with at least one template whose plain instantiation parses.
    pub fn check_realizable(&self, class: &str, grammar: &Grammar) -> Result<()> {
        let probe = self.inflections.keys().next().cloned().unwrap_or_default();
        for tpl in self.templates_for(class) {
            let (s, _) = self.expand(tpl, &probe, &mut |_| 0)?;
            if !parse(&s, grammar, 1).is_empty() {
                return Ok(());
            }
        }
        Err(Error::Unrealizable(class.to_string()))
    }

    /// Instantiate one template for the canonical filler choice.
    pub fn instantiate(&self, tpl: &Template, lemma: &str) -> Result<(Sentence, usize)> {
        self.expand(tpl, lemma, &mut |_| 0)
    }
}

/// Gold label for one generated sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthLabel {
    pub sentence: usize,
    pub verb: String,
    pub index: usize,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SynthCorpus {
    pub sentences: Vec<Sentence>,
    pub labels: Vec<SynthLabel>,
    /// Seed distribution, kept for the gold ranking.
    pub seed: BTreeMap<String, Vec<(String, f64)>>,
}

impl SynthCorpus {
    pub fn tagged_text(&self) -> String {
        write_tagged_corpus(&self.sentences)
    }

    /// `sentence verb index class` lines.
    pub fn labels_text(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", l.sentence, l.verb, l.index, l.class);
        }
        out
    }

    /// Gold entries: seeded classes, ranked by seed weight, with exemplar counts.
    pub fn gold(&self) -> BTreeMap<String, GoldEntry> {
        let mut out = BTreeMap::new();
        for (verb, dist) in &self.seed {
            let mut e = GoldEntry::new(verb.clone());
            let mut ranked: Vec<&(String, f64)> = dist.iter().filter(|(_, w)| *w > 0.0).collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let mut groups: Vec<Vec<String>> = Vec::new();
            let mut last = None;
            for (c, w) in ranked {
                e.classes.insert(c.clone());
                if last == Some(*w) {
                    groups.last_mut().unwrap().push(c.clone());
                } else {
                    groups.push(vec![c.clone()]);
                }
                last = Some(*w);
            }
            e.ranking = Some(groups);
            for l in self.labels.iter().filter(|l| &l.verb == verb) {
                *e.tokens.entry(l.class.clone()).or_default() += 1;
            }
            out.insert(verb.clone(), e);
        }
        out
    }
}

/// Seed lexicon lines: `lemma CLASS:weight CLASS:weight ...`.
pub fn parse_seed_lexicon(text: &str) -> Result<BTreeMap<String, Vec<(String, f64)>>> {
    let mut out = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |m: String| format_err("seed lexicon", ln + 1, m);
        let mut f = line.split_whitespace();
        let verb = f.next().unwrap().to_string();
        let dist = f
            .map(|cw| {
                let (c, w) = cw.rsplit_once(':').ok_or_else(|| err(format!("expected CLASS:weight, got `{cw}`")))?;
                let w: f64 = w.parse().map_err(|_| err(format!("bad weight `{w}`")))?;
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(err(format!("bad weight `{w}`")));
                }
                Ok((c.to_string(), w))
            })
            .collect::<Result<Vec<_>>>()?;
        if dist.is_empty() || dist.iter().all(|(_, w)| *w == 0.0) {
            return Err(err(format!("{verb} needs a positive class weight")));
        }
        out.insert(verb, dist);
    }
    Ok(out)
}

/// `n` sentences: verbs uniformly, classes by seed weight, templates and
/// fillers uniformly. Deterministic for a given seed.
pub fn gen_synth_corpus(
    seed_lexicon: &BTreeMap<String, Vec<(String, f64)>>,
    templates: &Templates,
    grammar: &Grammar,
    rng_seed: u64,
    n: usize,
) -> Result<SynthCorpus> {
    let mut corpus = SynthCorpus {
        seed: seed_lexicon.clone(),
        ..SynthCorpus::default()
    };
    let mut checked = BTreeMap::new();
    for (verb, dist) in seed_lexicon {
        if !templates.inflections.contains_key(verb) {
            return Err(Error::Invalid(format!("no inflections for verb `{verb}`")));
        }
        for (class, w) in dist {
            if *w > 0.0 && !checked.contains_key(class) {
                templates.check_realizable(class, grammar)?;
                checked.insert(class.clone(), ());
            }
        }
    }
    if n == 0 {
        return Ok(corpus);
    }
    let verbs: Vec<&String> = seed_lexicon.keys().collect();
    if verbs.is_empty() {
        return Err(Error::Invalid("empty seed lexicon".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let pickers: Vec<WeightedIndex<f64>> = verbs
        .iter()
        .map(|v| WeightedIndex::new(seed_lexicon[*v].iter().map(|(_, w)| *w)).expect("positive weights"))
        .collect();
    for sid in 0..n {
        let vi = rng.gen_range(0..verbs.len());
        let verb = verbs[vi];
        let class = &seed_lexicon[verb][pickers[vi].sample(&mut rng)].0;
        let options: Vec<&Template> = templates.templates_for(class).collect();
        let tpl = options[rng.gen_range(0..options.len())];
        let (sentence, index) = templates.expand(tpl, verb, &mut |k| rng.gen_range(0..k))?;
        corpus.sentences.push(sentence);
        corpus.labels.push(SynthLabel {
            sentence: sid,
            verb: verb.clone(),
            index,
            class: class.clone(),
        });
    }
    Ok(corpus)
}

/// The best-ranked analysis in which the labelled predicate classifies as
/// its gold class. Used as the reference tree for bracketing scores.
pub fn gold_analysis<'a>(
    analyses: &'a [Analysis],
    label: &SynthLabel,
    inventory: &ClassInventory,
) -> Result<Option<&'a Analysis>> {
    for a in analyses {
        if let Some(p) = extract(a, label.index, label.sentence)? {
            if inventory.classify(&p).class_id() == Some(label.class.as_str()) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRAMMAR: &str = "\
%start S
%vp V1
%vsubcat NONE NP
S -> N V1 : 1.0 subj h
V1 -> V : 0.5 VSUBCAT=NONE h
V1 -> V N : 0.5 VSUBCAT=NP h arg
N -> PPHS1 : 0.5
N -> NN1 : 0.5
V -> VVD : 1.0
";

    const TEMPLATES: &str = "\
INFL sleep sleep sleeps slept slept sleeping
INFL eat eat eats ate eaten eating
FILL SUBJ he_PPHS1 | she_PPHS1
FILL OBJ bread_NN1 | fish_NN1 | soup_NN1
T INTRANS {SUBJ} {V:VVD}
T NP {SUBJ} {V:VVD} {OBJ}
T NP_NP {SUBJ} {V:VVD} {OBJ} {OBJ} {OBJ}
";

    fn setup() -> (Grammar, Templates) {
        (Grammar::parse(GRAMMAR).unwrap(), Templates::parse(TEMPLATES).unwrap())
    }

    fn seed(s: &str) -> BTreeMap<String, Vec<(String, f64)>> {
        parse_seed_lexicon(s).unwrap()
    }

    #[test]
    fn empty_and_single_class() {
        let (g, t) = setup();
        let c = gen_synth_corpus(&seed("sleep INTRANS:1"), &t, &g, 1, 0).unwrap();
        assert!(c.sentences.is_empty());
        let c = gen_synth_corpus(&seed("sleep INTRANS:1"), &t, &g, 1, 50).unwrap();
        assert_eq!(c.sentences.len(), 50);
        assert!(c.labels.iter().all(|l| l.class == "INTRANS" && l.index == 1));
        assert_eq!(c.sentences[0][1].surface, "slept");
        assert_eq!(c.sentences[0][1].lemma, "sleep");
    }

    #[test]
    fn proportions_converge() {
        let (g, t) = setup();
        let c = gen_synth_corpus(&seed("eat NP:0.8 INTRANS:0.2"), &t, &g, 42, 1000).unwrap();
        let np = c.labels.iter().filter(|l| l.class == "NP").count() as f64 / 1000.0;
        assert!((np - 0.8).abs() <= 0.04, "NP share {np}");
        let gold = c.gold();
        assert_eq!(gold["eat"].ranking.as_ref().unwrap()[0], ["NP"]);
        assert_eq!(gold["eat"].tokens.values().sum::<u64>(), 1000);
    }

    #[test]
    fn deterministic_for_seed() {
        let (g, t) = setup();
        let s = seed("eat NP:0.5 INTRANS:0.5\nsleep INTRANS:1");
        let a = gen_synth_corpus(&s, &t, &g, 9, 100).unwrap();
        let b = gen_synth_corpus(&s, &t, &g, 9, 100).unwrap();
        assert_eq!(a.tagged_text(), b.tagged_text());
        assert_eq!(a.labels_text(), b.labels_text());
        let c = gen_synth_corpus(&s, &t, &g, 10, 100).unwrap();
        assert_ne!(a.tagged_text(), c.tagged_text());
    }

    #[test]
    fn unrealizable_classes() {
        let (g, t) = setup();
        // template exists but the grammar has no ditransitive rule
        assert_eq!(
            gen_synth_corpus(&seed("eat NP_NP:1"), &t, &g, 1, 5),
            Err(Error::Unrealizable("NP_NP".into()))
        );
        assert_eq!(
            gen_synth_corpus(&seed("eat PP:1"), &t, &g, 1, 5),
            Err(Error::Unrealizable("PP".into()))
        );
        assert!(gen_synth_corpus(&seed("drink NP:1"), &t, &g, 1, 5).is_err());
    }

    #[test]
    fn bad_files() {
        assert!(Templates::parse("T NP {SUBJ} {V:VVD}\n").is_err());
        assert!(Templates::parse("T NP he_PPHS1\n").is_err());
        assert!(Templates::parse("INFL go go goes\n").is_err());
        assert!(Templates::parse("T NP {V:VBZ}\n").is_err());
        assert!(parse_seed_lexicon("eat NP\n").is_err());
        assert!(parse_seed_lexicon("eat NP:0\n").is_err());
    }
}
