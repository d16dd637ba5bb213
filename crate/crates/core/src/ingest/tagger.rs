//! First-order hidden Markov part-of-speech tagger.
//!
//! Transition and emission distributions are add-k smoothed counts. Known
//! words may only take tags they were seen with in training; unknown words
//! range over the configured open-class tags.

use std::collections::{BTreeMap, BTreeSet};

use super::corpus::{Sentence, TaggedToken};
use crate::error::{Error, Result};

const START: &str = "<s>";
const END: &str = "</s>";
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TaggerConfig {
    /// Add-k constant for transitions and emissions.
    pub smoothing: f64,
    /// Tags an unknown word may take. Empty means every tag.
    pub open_tags: Vec<String>,
    /// Minimum posterior odds against the chosen tag for an alternative to be kept.
    pub alt_ratio: f64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            smoothing: 0.5,
            open_tags: Vec::new(),
            alt_ratio: 0.1,
        }
    }
}

/// Raw event counts. Counts from disjoint shards can be merged in any order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TagCounts {
    pub transitions: BTreeMap<(String, String), u64>,
    pub emissions: BTreeMap<(String, String), u64>,
}

impl TagCounts {
    pub fn add_sentence(&mut self, sentence: &[TaggedToken]) {
        let mut prev = START.to_string();
        for tok in sentence {
            *self
                .transitions
                .entry((prev.clone(), tok.tag.clone()))
                .or_default() += 1;
            *self
                .emissions
                .entry((tok.surface.to_lowercase(), tok.tag.clone()))
                .or_default() += 1;
            prev = tok.tag.clone();
        }
        *self.transitions.entry((prev, END.to_string())).or_default() += 1;
    }

    pub fn merge(&mut self, other: &TagCounts) {
        for (k, v) in &other.transitions {
            *self.transitions.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.emissions {
            *self.emissions.entry(k.clone()).or_default() += v;
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaggerModel {
    tags: Vec<String>,
    /// Rows: tags then START. Columns: tags then END.
    trans: Vec<Vec<u64>>,
    trans_totals: Vec<u64>,
    /// Lowercased word -> per-tag counts.
    emit: BTreeMap<String, Vec<u64>>,
    tag_totals: Vec<u64>,
    open: Vec<usize>,
    config: TaggerConfig,
    counts: TagCounts,
}

impl TaggerModel {
    pub fn train(corpus: &[Sentence], config: TaggerConfig) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut counts = TagCounts::default();
        for (si, s) in corpus.iter().enumerate() {
            if let Some(ti) = s.iter().position(|t| t.tag.is_empty()) {
                return Err(Error::EmptyTag {
                    sentence: si,
                    token: ti,
                });
            }
            counts.add_sentence(s);
        }
        Self::from_counts(counts, config)
    }

    pub fn from_counts(counts: TagCounts, config: TaggerConfig) -> Result<Self> {
        if counts.emissions.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if !(config.smoothing > 0.0) {
            return Err(Error::Invalid("tagger smoothing must be positive".into()));
        }
        let tags: Vec<String> = counts
            .emissions
            .keys()
            .map(|(_, t)| t.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = tags.len();
        let idx = |t: &str| tags.binary_search_by(|x| x.as_str().cmp(t)).ok();
        let mut trans = vec![vec![0u64; n + 1]; n + 1];
        for ((a, b), c) in &counts.transitions {
            let row = if a == START { Some(n) } else { idx(a) };
            let col = if b == END { Some(n) } else { idx(b) };
            if let (Some(r), Some(col)) = (row, col) {
                trans[r][col] += c;
            }
        }
        let trans_totals = trans.iter().map(|r| r.iter().sum()).collect();
        let mut emit: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        let mut tag_totals = vec![0u64; n];
        for ((w, t), c) in &counts.emissions {
            let ti = idx(t).expect("tag collected above");
            emit.entry(w.clone()).or_insert_with(|| vec![0; n])[ti] += c;
            tag_totals[ti] += c;
        }
        let mut open: Vec<usize> = config.open_tags.iter().filter_map(|t| idx(t)).collect();
        open.sort_unstable();
        open.dedup();
        if open.is_empty() {
            open = (0..n).collect();
        }
        Ok(TaggerModel {
            tags,
            trans,
            trans_totals,
            emit,
            tag_totals,
            open,
            config,
            counts,
        })
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn counts(&self) -> &TagCounts {
        &self.counts
    }

    pub fn tag_index(&self, tag: &str) -> Option<usize> {
        self.tags.binary_search_by(|x| x.as_str().cmp(tag)).ok()
    }

    /// P(next | prev); `None` stands for the sentence start (prev) or end (next).
    pub fn trans_prob(&self, prev: Option<usize>, next: Option<usize>) -> f64 {
        let n = self.tags.len();
        let k = self.config.smoothing;
        match prev {
            None => match next {
                // sentences are non-empty
                None => 0.0,
                Some(j) => (self.trans[n][j] as f64 + k) / (self.trans_totals[n] as f64 + k * n as f64),
            },
            Some(i) => {
                let col = next.unwrap_or(n);
                (self.trans[i][col] as f64 + k) / (self.trans_totals[i] as f64 + k * (n + 1) as f64)
            }
        }
    }

    /// P(word | tag) over the training vocabulary plus one unknown-word event.
    pub fn emit_prob(&self, word: &str, tag: usize) -> f64 {
        let k = self.config.smoothing;
        let v = self.emit.len() as f64;
        let c = self
            .emit
            .get(&word.to_lowercase())
            .map_or(0, |row| row[tag]) as f64;
        (c + k) / (self.tag_totals[tag] as f64 + k * (v + 1.0))
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.emit.keys().map(String::as_str)
    }

    /// Tags the word may take: those seen with it, or the open classes if unseen.
    pub fn candidates(&self, word: &str) -> Vec<usize> {
        match self.emit.get(&word.to_lowercase()) {
            Some(row) => (0..self.tags.len()).filter(|&t| row[t] > 0).collect(),
            None => self.open.clone(),
        }
    }

    /// Best tag path for `words` with per-token alternatives.
    pub fn tag(&self, words: &[String]) -> Vec<TaggedToken> {
        if words.is_empty() {
            return Vec::new();
        }
        let len = words.len();
        let cands: Vec<Vec<usize>> = words.iter().map(|w| self.candidates(w)).collect();
        let emit: Vec<Vec<f64>> = words
            .iter()
            .zip(&cands)
            .map(|(w, cs)| cs.iter().map(|&t| self.emit_prob(w, t).ln()).collect())
            .collect();
        let lt = |a: Option<usize>, b: Option<usize>| self.trans_prob(a, b).ln();

        // best[i][c]: best log score of the suffix i.. given candidate c at i
        let mut best: Vec<Vec<f64>> = vec![Vec::new(); len];
        best[len - 1] = cands[len - 1]
            .iter()
            .enumerate()
            .map(|(c, &t)| emit[len - 1][c] + lt(Some(t), None))
            .collect();
        for i in (0..len - 1).rev() {
            best[i] = cands[i]
                .iter()
                .enumerate()
                .map(|(c, &t)| {
                    let next = cands[i + 1]
                        .iter()
                        .enumerate()
                        .map(|(d, &u)| lt(Some(t), Some(u)) + best[i + 1][d])
                        .fold(f64::NEG_INFINITY, f64::max);
                    emit[i][c] + next
                })
                .collect();
        }

        // Walk forward picking the lowest-ordered tag among optimal choices;
        // this yields the lexicographically smallest best path.
        let mut path = Vec::with_capacity(len);
        let mut prev: Option<usize> = None;
        for i in 0..len {
            let mut choice = 0;
            let mut choice_score = f64::NEG_INFINITY;
            for (c, &t) in cands[i].iter().enumerate() {
                let s = lt(prev, Some(t)) + best[i][c];
                if s > choice_score + TIE_EPS {
                    choice = c;
                    choice_score = s;
                }
            }
            path.push(choice);
            prev = Some(cands[i][choice]);
        }

        let posts = self.posteriors(&cands, &emit);
        let cutoff = self.config.alt_ratio.ln();
        path.iter()
            .enumerate()
            .map(|(i, &c)| {
                let chosen = cands[i][c];
                let mut tok = TaggedToken::new(i, words[i].clone(), self.tags[chosen].clone());
                for (d, &t) in cands[i].iter().enumerate() {
                    let lo = posts[i][d] - posts[i][c];
                    if d != c && lo > cutoff {
                        tok.alts.push((self.tags[t].clone(), lo));
                    }
                }
                tok
            })
            .collect()
    }

    /// Unnormalized log posteriors per candidate via forward-backward.
    fn posteriors(&self, cands: &[Vec<usize>], emit: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let len = cands.len();
        let lt = |a: Option<usize>, b: Option<usize>| self.trans_prob(a, b).ln();
        let mut fwd: Vec<Vec<f64>> = vec![Vec::new(); len];
        fwd[0] = cands[0]
            .iter()
            .enumerate()
            .map(|(c, &t)| lt(None, Some(t)) + emit[0][c])
            .collect();
        for i in 1..len {
            fwd[i] = cands[i]
                .iter()
                .enumerate()
                .map(|(c, &t)| {
                    let terms: Vec<f64> = cands[i - 1]
                        .iter()
                        .enumerate()
                        .map(|(d, &u)| fwd[i - 1][d] + lt(Some(u), Some(t)))
                        .collect();
                    log_sum_exp(&terms) + emit[i][c]
                })
                .collect();
        }
        let mut bwd: Vec<Vec<f64>> = vec![Vec::new(); len];
        bwd[len - 1] = cands[len - 1].iter().map(|&t| lt(Some(t), None)).collect();
        for i in (0..len - 1).rev() {
            bwd[i] = cands[i]
                .iter()
                .map(|&t| {
                    let terms: Vec<f64> = cands[i + 1]
                        .iter()
                        .enumerate()
                        .map(|(d, &u)| lt(Some(t), Some(u)) + emit[i + 1][d] + bwd[i + 1][d])
                        .collect();
                    log_sum_exp(&terms)
                })
                .collect();
        }
        fwd.iter()
            .zip(&bwd)
            .map(|(f, b)| f.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect()
    }

    /// Log probability of a complete tag path, including start and end transitions.
    pub fn path_log_prob(&self, words: &[String], tags: &[usize]) -> f64 {
        let mut score = 0.0;
        let mut prev = None;
        for (w, &t) in words.iter().zip(tags) {
            score += self.trans_prob(prev, Some(t)).ln() + self.emit_prob(w, t).ln();
            prev = Some(t);
        }
        score + self.trans_prob(prev, None).ln()
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::corpus::read_tagged_corpus;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn counts_for_one_sentence() {
        let corpus = read_tagged_corpus("a_DT dog_NN");
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let c = m.counts();
        assert_eq!(c.transitions[&("DT".into(), "NN".into())], 1);
        assert_eq!(c.emissions[&("dog".into(), "NN".into())], 1);
        assert_eq!(c.transitions[&("<s>".into(), "DT".into())], 1);
        assert_eq!(c.transitions[&("NN".into(), "</s>".into())], 1);
    }

    #[test]
    fn duplicated_corpus_doubles_counts() {
        let text = "a_DT dog_NN barks_VVZ\nthe_DT cat_NN\n";
        let once = TaggerModel::train(&read_tagged_corpus(text), TaggerConfig::default()).unwrap();
        let twice = TaggerModel::train(
            &read_tagged_corpus(&format!("{text}{text}")),
            TaggerConfig::default(),
        )
        .unwrap();
        for (k, v) in &once.counts().transitions {
            assert_eq!(twice.counts().transitions[k], 2 * v);
        }
        for (k, v) in &once.counts().emissions {
            assert_eq!(twice.counts().emissions[k], 2 * v);
        }
        assert_eq!(once.counts().transitions.len(), twice.counts().transitions.len());
    }

    #[test]
    fn three_sentence_probabilities_match_hand_normalization() {
        // Tags: DT, NN, VVZ (T = 3). Vocabulary: a, dog, barks, the, cat, sleeps (V = 6).
        let corpus = read_tagged_corpus("a_DT dog_NN barks_VVZ\nthe_DT cat_NN\ndog_NN sleeps_VVZ\n");
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let (dt, nn, vvz) = (
            m.tag_index("DT").unwrap(),
            m.tag_index("NN").unwrap(),
            m.tag_index("VVZ").unwrap(),
        );
        // START: DT 2, NN 1 out of 3 starts; add-0.5 over 3 tags.
        assert!((m.trans_prob(None, Some(dt)) - 2.5 / 4.5).abs() < 1e-12);
        assert!((m.trans_prob(None, Some(vvz)) - 0.5 / 4.5).abs() < 1e-12);
        // NN row: VVZ 2, END 1, total 3; add-0.5 over 3 tags + END.
        assert!((m.trans_prob(Some(nn), Some(vvz)) - 2.5 / 5.0).abs() < 1e-12);
        assert!((m.trans_prob(Some(nn), None) - 1.5 / 5.0).abs() < 1e-12);
        assert!((m.trans_prob(Some(nn), Some(nn)) - 0.5 / 5.0).abs() < 1e-12);
        // Emissions: NN emitted dog×2, cat×1; denominator 3 + 0.5·(6+1).
        assert!((m.emit_prob("dog", nn) - 2.5 / 6.5).abs() < 1e-12);
        assert!((m.emit_prob("zebra", nn) - 0.5 / 6.5).abs() < 1e-12);
        assert!((m.emit_prob("Dog", nn) - 2.5 / 6.5).abs() < 1e-12);
    }

    #[test]
    fn distributions_normalize() {
        let corpus = read_tagged_corpus("a_DT dog_NN barks_VVZ\nthe_DT cat_NN\ndog_NN sleeps_VVZ\n");
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let n = m.tags().len();
        let start: f64 = (0..n).map(|j| m.trans_prob(None, Some(j))).sum();
        assert!((start - 1.0).abs() < 1e-9);
        for i in 0..n {
            let row: f64 = (0..n).map(|j| m.trans_prob(Some(i), Some(j))).sum::<f64>()
                + m.trans_prob(Some(i), None);
            assert!((row - 1.0).abs() < 1e-9);
            let vocab: Vec<String> = m.vocabulary().map(str::to_string).collect();
            let e: f64 = vocab.iter().map(|w| m.emit_prob(w, i)).sum::<f64>()
                + m.emit_prob("<unseen-word>", i);
            assert!((e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_corpus_and_empty_tag_are_errors() {
        assert_eq!(
            TaggerModel::train(&[], TaggerConfig::default()).unwrap_err(),
            Error::EmptyCorpus
        );
        let corpus = read_tagged_corpus("a_DT dog_NN\nthe_DT cat\n");
        assert_eq!(
            TaggerModel::train(&corpus, TaggerConfig::default()).unwrap_err(),
            Error::EmptyTag {
                sentence: 1,
                token: 1
            }
        );
    }

    #[test]
    fn single_permitted_tag_per_word() {
        let corpus = read_tagged_corpus("the_AT dog_NN1 slept_VVD\nthe_AT cat_NN1 ran_VVD\n");
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let out = m.tag(&words("the cat slept"));
        let tags: Vec<&str> = out.iter().map(|t| t.tag.as_str()).collect();
        assert_eq!(tags, ["AT", "NN1", "VVD"]);
        assert!(out.iter().all(|t| t.alts.is_empty()));
        assert_eq!(out.iter().map(|t| t.index).collect::<Vec<_>>(), [0, 1, 2]);
    }

    #[test]
    fn unseen_words_take_open_classes() {
        let corpus = read_tagged_corpus("the_AT dog_NN1 slept_VVD\nthe_AT cat_NN1 ran_VVD\n");
        let cfg = TaggerConfig {
            open_tags: vec!["NN1".into(), "VVD".into()],
            ..TaggerConfig::default()
        };
        let m = TaggerModel::train(&corpus, cfg).unwrap();
        let out = m.tag(&words("the zebra slept"));
        assert_eq!(out[1].tag, "NN1");
    }

    #[test]
    fn pronoun_from_example_sentence() {
        let corpus = read_tagged_corpus(
            "he_PPHS1 attributed_VVD his_APP$ failure_NN1 ,_, he_PPHS1 said_VVD ,_, to_II no<blank>one_PN buying_VVG his_APP$ books_NN2\n\
             him_PPHO1 he_PPHS1 saw_VVD\n",
        );
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let out = m.tag(&words("he said"));
        assert_eq!(out[0].tag, "PPHS1");
    }

    #[test]
    fn ambiguous_word_reports_alternative() {
        // `saw` is VVD twice and NN1 once, in identical contexts.
        let corpus = read_tagged_corpus("he_PP saw_VVD\nhe_PP saw_VVD\nhe_PP saw_NN1\n");
        let m = TaggerModel::train(&corpus, TaggerConfig::default()).unwrap();
        let out = m.tag(&words("he saw"));
        assert_eq!(out[1].tag, "VVD");
        assert_eq!(out[1].alts.len(), 1);
        assert_eq!(out[1].alts[0].0, "NN1");
        assert!(out[1].alts[0].1 < 0.0);
    }
}
