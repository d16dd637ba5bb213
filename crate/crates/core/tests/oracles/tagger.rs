//! Count-based HMM oracle with exhaustive path enumeration.

use std::collections::{BTreeMap, BTreeSet};

use subcat::ingest::read_tagged_corpus;

pub const TRAIN: &str = "\
the_DT dog_NN can_MD run_VB fast_RB
the_DT can_NN is_VB red_JJ
they_PN run_VB a_DT fast_JJ race_NN
we_PN fast_VB in_IN the_DT winter_NN
the_DT fast_NN ended_VB
a_DT run_NN in_IN the_DT park_NN
they_PN can_VB fish_NN
fish_NN can_MD swim_VB fast_RB
the_DT red_JJ dog_NN can_MD fish_VB
we_PN saw_VB the_DT race_NN
";

/// Probabilities recomputed from raw counts: add-k smoothing, known words
/// restricted to their observed tags.
pub struct Oracle {
    pub tags: Vec<String>,
    trans: BTreeMap<(String, String), f64>,
    from: BTreeMap<String, f64>,
    emit: BTreeMap<(String, String), f64>,
    tag_total: BTreeMap<String, f64>,
    vocab: usize,
    k: f64,
}

impl Oracle {
    pub fn new(text: &str, k: f64) -> Self {
        let mut o = Oracle {
            tags: Vec::new(),
            trans: BTreeMap::new(),
            from: BTreeMap::new(),
            emit: BTreeMap::new(),
            tag_total: BTreeMap::new(),
            vocab: 0,
            k,
        };
        let mut tags = BTreeSet::new();
        let mut vocab = BTreeSet::new();
        for s in read_tagged_corpus(text) {
            let mut prev = "<s>".to_string();
            for t in &s {
                let w = t.surface.to_lowercase();
                *o.trans.entry((prev.clone(), t.tag.clone())).or_default() += 1.0;
                *o.from.entry(prev.clone()).or_default() += 1.0;
                *o.emit.entry((w.clone(), t.tag.clone())).or_default() += 1.0;
                *o.tag_total.entry(t.tag.clone()).or_default() += 1.0;
                tags.insert(t.tag.clone());
                vocab.insert(w);
                prev = t.tag.clone();
            }
            *o.trans.entry((prev.clone(), "</s>".into())).or_default() += 1.0;
            *o.from.entry(prev).or_default() += 1.0;
        }
        o.tags = tags.into_iter().collect();
        o.vocab = vocab.len();
        o
    }

    pub fn candidates(&self, w: &str) -> Vec<usize> {
        let seen: Vec<usize> = (0..self.tags.len())
            .filter(|&t| self.emit.contains_key(&(w.to_string(), self.tags[t].clone())))
            .collect();
        if seen.is_empty() {
            (0..self.tags.len()).collect()
        } else {
            seen
        }
    }

    fn trans(&self, a: &str, b: &str) -> f64 {
        let n = self.tags.len() as f64;
        let outcomes = if a == "<s>" { n } else { n + 1.0 };
        let c = self.trans.get(&(a.to_string(), b.to_string())).copied().unwrap_or(0.0);
        (c + self.k) / (self.from.get(a).copied().unwrap_or(0.0) + self.k * outcomes)
    }

    fn emit(&self, w: &str, t: &str) -> f64 {
        let c = self.emit.get(&(w.to_string(), t.to_string())).copied().unwrap_or(0.0);
        (c + self.k) / (self.tag_total[t] + self.k * (self.vocab as f64 + 1.0))
    }

    pub fn score(&self, words: &[String], path: &[usize]) -> f64 {
        let mut prev = "<s>";
        let mut s = 0.0;
        for (w, &t) in words.iter().zip(path) {
            let tag = self.tags[t].as_str();
            s += self.trans(prev, tag).ln() + self.emit(w, tag).ln();
            prev = tag;
        }
        s + self.trans(prev, "</s>").ln()
    }

    /// Highest-scoring path; ties go to the lexicographically smallest.
    pub fn best(&self, words: &[String]) -> Vec<usize> {
        let cands: Vec<Vec<usize>> = words.iter().map(|w| self.candidates(w)).collect();
        let mut all: Vec<(f64, Vec<usize>)> = Vec::new();
        let mut cur = vec![0usize; words.len()];
        loop {
            let path: Vec<usize> = cur.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
            all.push((self.score(words, &path), path));
            let mut pos = words.len();
            loop {
                if pos == 0 {
                    let top = all.iter().map(|(s, _)| *s).fold(f64::NEG_INFINITY, f64::max);
                    return all
                        .into_iter()
                        .filter(|(s, _)| *s >= top - 1e-9)
                        .map(|(_, p)| p)
                        .min()
                        .unwrap();
                }
                pos -= 1;
                cur[pos] += 1;
                if cur[pos] < cands[pos].len() {
                    break;
                }
                cur[pos] = 0;
            }
        }
    }
}
