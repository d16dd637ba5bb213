//! Corpus intake: tagging and lemmatization.

pub mod corpus;
pub mod lemma;
pub mod tagger;

pub use corpus::{
    read_raw_corpus, read_sentences, read_tagged_corpus, write_sentences, write_tagged_corpus, Sentence,
    TaggedToken,
};
pub use lemma::LemmaRuleset;
pub use tagger::{TagCounts, TaggerConfig, TaggerModel};

use crate::error::{format_err, Result};
use lemma::strip_comment;

/// Closed tagset from a config file: one tag per line, optionally followed
/// by `open` for tags that unknown words may take.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tagset {
    pub tags: Vec<String>,
    pub open: Vec<String>,
}

impl Tagset {
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = Tagset::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                [tag] => set.tags.push(tag.to_string()),
                [tag, "open"] => {
                    set.tags.push(tag.to_string());
                    set.open.push(tag.to_string());
                }
                _ => return Err(format_err("tagset", ln + 1, format!("bad line `{line}`"))),
            }
        }
        Ok(set)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

/// Tag a tokenized sentence and attach lemmas.
pub fn tag_sentence(words: &[String], model: &TaggerModel, rules: &LemmaRuleset) -> Sentence {
    model
        .tag(words)
        .iter()
        .map(|t| rules.lemmatize(t))
        .collect()
}
