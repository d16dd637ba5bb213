//! Corpus file formats.
//!
//! Raw corpora hold one pre-tokenized sentence per line. Tagged corpora use
//! `token_TAG` with the last underscore as separator, so `no<blank>one_PN`
//! and `his_APP$` both split as expected. The tagged-sentence artifact written
//! by the tag stage is a tab-separated, one-token-per-line layout that also
//! carries lemmas and tag alternatives.

use std::fmt::Write as _;

use crate::error::{format_err, Error, Result};

/// A token with its part-of-speech tag and (once lemmatized) its lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedToken {
    pub index: usize,
    pub surface: String,
    pub tag: String,
    /// Empty until lemmatized.
    pub lemma: String,
    /// Competing tags with their log posterior odds against `tag` (all ≤ 0).
    pub alts: Vec<(String, f64)>,
}

impl TaggedToken {
    pub fn new(index: usize, surface: impl Into<String>, tag: impl Into<String>) -> Self {
        TaggedToken {
            index,
            surface: surface.into(),
            tag: tag.into(),
            lemma: String::new(),
            alts: Vec::new(),
        }
    }

    pub fn with_lemma(mut self, lemma: impl Into<String>) -> Self {
        self.lemma = lemma.into();
        self
    }

    /// The lemma if set, otherwise the lowercased surface form.
    pub fn head_form(&self) -> String {
        if self.lemma.is_empty() {
            self.surface.to_lowercase()
        } else {
            self.lemma.clone()
        }
    }
}

pub type Sentence = Vec<TaggedToken>;

/// Split whitespace-delimited sentences, one per non-blank line.
pub fn read_raw_corpus(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect()
}

/// Parse a `token_TAG` corpus. A token without an underscore, or with
/// nothing after the last underscore, yields an empty tag, which
/// [`crate::ingest::TaggerModel::train`] rejects.
pub fn read_tagged_corpus(text: &str) -> Vec<Sentence> {
    read_raw_corpus(text)
        .into_iter()
        .map(|words| {
            words
                .into_iter()
                .enumerate()
                .map(|(i, w)| match w.rfind('_') {
                    Some(pos) if pos > 0 => TaggedToken::new(i, &w[..pos], &w[pos + 1..]),
                    _ => TaggedToken::new(i, w, ""),
                })
                .collect()
        })
        .collect()
}

pub fn write_tagged_corpus(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let line: Vec<String> = s.iter().map(|t| format!("{}_{}", t.surface, t.tag)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Lemma-tag rendering, e.g. `he_PPHS1 attribute_VVD`.
pub fn lemma_tag_line(sentence: &[TaggedToken]) -> String {
    sentence
        .iter()
        .map(|t| format!("{}_{}", t.head_form(), t.tag))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serialize tagged, lemmatized sentences as the tag-stage artifact.
pub fn write_sentences(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for (id, s) in sentences.iter().enumerate() {
        let _ = writeln!(out, "# sent {id}");
        for t in s {
            let alts = if t.alts.is_empty() {
                "-".to_string()
            } else {
                t.alts
                    .iter()
                    .map(|(tag, lo)| format!("{tag}:{lo}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", t.index, t.surface, t.lemma, t.tag, alts);
        }
        out.push('\n');
    }
    out
}

pub fn read_sentences(text: &str) -> Result<Vec<Sentence>> {
    const WHAT: &str = "tagged sentences";
    let mut out: Vec<Sentence> = Vec::new();
    let mut current: Option<Sentence> = None;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        if let Some(rest) = line.strip_prefix("# sent ") {
            if let Some(s) = current.take() {
                out.push(s);
            }
            let id: usize = rest
                .trim()
                .parse()
                .map_err(|_| format_err(WHAT, ln, "bad sentence id"))?;
            if id != out.len() {
                return Err(format_err(WHAT, ln, format!("expected sentence {}", out.len())));
            }
            current = Some(Vec::new());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let sent = current
            .as_mut()
            .ok_or_else(|| format_err(WHAT, ln, "token before sentence header"))?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(format_err(WHAT, ln, "expected 5 tab-separated columns"));
        }
        let index: usize = cols[0].parse().map_err(|_| format_err(WHAT, ln, "bad index"))?;
        if index != sent.len() {
            return Err(format_err(WHAT, ln, "token indices must be contiguous"));
        }
        let mut alts = Vec::new();
        if cols[4] != "-" {
            for a in cols[4].split(',') {
                let (tag, lo) = a
                    .rsplit_once(':')
                    .ok_or_else(|| format_err(WHAT, ln, "bad alternative"))?;
                let lo: f64 = lo.parse().map_err(|_| format_err(WHAT, ln, "bad log-odds"))?;
                alts.push((tag.to_string(), lo));
            }
        }
        sent.push(TaggedToken {
            index,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            tag: cols[3].to_string(),
            alts,
        });
    }
    if let Some(s) = current.take() {
        out.push(s);
    }
    Ok(out)
}

/// Check that token indices run 0..len.
pub fn check_indices(sentence: &[TaggedToken]) -> Result<()> {
    for (i, t) in sentence.iter().enumerate() {
        if t.index != i {
            return Err(Error::Invalid(format!(
                "token `{}` has index {}, expected {}",
                t.surface, t.index, i
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_last_underscore() {
        let c = read_tagged_corpus("he_PPHS1 no<blank>one_PN his_APP$ a_b_NN1\n\n");
        assert_eq!(c.len(), 1);
        let tags: Vec<&str> = c[0].iter().map(|t| t.tag.as_str()).collect();
        assert_eq!(tags, ["PPHS1", "PN", "APP$", "NN1"]);
        assert_eq!(c[0][3].surface, "a_b");
        assert_eq!(c[0][3].index, 3);
    }

    #[test]
    fn missing_tag_is_empty() {
        let c = read_tagged_corpus("dog cat_");
        assert_eq!(c[0][0].tag, "");
        assert_eq!(c[0][1].tag, "");
    }

    #[test]
    fn sentence_artifact_round_trips() {
        let mut t = TaggedToken::new(0, "He", "PPHS1").with_lemma("he");
        t.alts.push(("PPHO1".into(), -1.5));
        let s = vec![t, TaggedToken::new(1, "slept", "VVD").with_lemma("sleep")];
        let text = write_sentences(&[s.clone(), s.clone()]);
        let back = read_sentences(&text).unwrap();
        assert_eq!(back, vec![s.clone(), s]);
    }

    #[test]
    fn lemma_tag_rendering() {
        let s = vec![
            TaggedToken::new(0, "He", "PPHS1").with_lemma("he"),
            TaggedToken::new(1, "attributed", "VVD").with_lemma("attribute"),
        ];
        assert_eq!(lemma_tag_line(&s), "he_PPHS1 attribute_VVD");
    }
}
