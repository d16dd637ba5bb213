//! Rule-based lemmatization.
//!
//! Ruleset file, one directive per line, `#` starts a comment:
//!
//! ```text
//! EXC was VBDZ be          # word tag lemma
//! RULE VVD ied y           # tag-prefix suffix replacement ("-" = empty)
//! ```

use std::collections::BTreeMap;

use super::corpus::TaggedToken;
use crate::error::{format_err, Result};

const MIN_STEM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SuffixRule {
    pub tag_prefix: String,
    pub suffix: String,
    pub replacement: String,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaRuleset {
    rules: Vec<SuffixRule>,
    exceptions: BTreeMap<(String, String), String>,
}

impl LemmaRuleset {
    pub fn new(rules: Vec<SuffixRule>, exceptions: BTreeMap<(String, String), String>) -> Self {
        LemmaRuleset { rules, exceptions }
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "lemma ruleset";
        let mut set = LemmaRuleset::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["EXC", word, tag, lemma] => {
                    set.exceptions.insert(
                        (word.to_lowercase(), tag.to_string()),
                        lemma.to_string(),
                    );
                }
                ["RULE", prefix, suffix, repl] => set.rules.push(SuffixRule {
                    tag_prefix: prefix.to_string(),
                    suffix: suffix.to_string(),
                    replacement: if *repl == "-" { String::new() } else { repl.to_string() },
                }),
                _ => return Err(format_err(WHAT, ln + 1, format!("unrecognized directive `{line}`"))),
            }
        }
        Ok(set)
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    /// Lemma for a surface form and tag: exceptions first, then the first
    /// matching rule, otherwise the lowercased surface.
    pub fn lemma_of(&self, surface: &str, tag: &str) -> String {
        let word = surface.to_lowercase();
        if let Some(l) = self.exceptions.get(&(word.clone(), tag.to_string())) {
            return l.clone();
        }
        for r in &self.rules {
            if !tag.starts_with(&r.tag_prefix) {
                continue;
            }
            if let Some(stem) = word.strip_suffix(&r.suffix) {
                if stem.chars().count() >= MIN_STEM {
                    return format!("{stem}{}", r.replacement);
                }
            }
        }
        word
    }

    pub fn lemmatize(&self, token: &TaggedToken) -> TaggedToken {
        let mut t = token.clone();
        t.lemma = self.lemma_of(&token.surface, &token.tag);
        if t.lemma.is_empty() {
            t.lemma = token.surface.clone();
        }
        t
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(p) => line[..p].trim(),
        None => line.trim(),
    }
}
