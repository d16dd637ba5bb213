//! TOML pipeline configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use subcat::rerank::RerankMode;

use crate::error::{CliError, CliResult};
use crate::stage::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    /// One whitespace-tokenized sentence per line, tagged by the HMM.
    Raw,
    /// `word_TAG` tokens; only lemmatized.
    #[default]
    Tagged,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub templates: PathBuf,
    pub seed_lexicon: PathBuf,
    #[serde(default = "default_sentences")]
    pub sentences: usize,
}

fn default_sentences() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub corpus_format: CorpusFormat,
    pub grammar: PathBuf,
    pub inventory: PathBuf,
    pub ruleset: PathBuf,
    pub priors: Option<PathBuf>,
    pub tagger_train: Option<PathBuf>,
    pub tagset: Option<PathBuf>,
    /// Pattern statistics; derived from the classified corpus when absent.
    pub stats: Option<PathBuf>,
    /// Lexicon used by `rerank`; the run's own lexicon when absent.
    pub lexicon: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    /// Gold bracketings for parser evaluation.
    pub brackets: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_mode", deserialize_with = "de_mode")]
    pub mode: RerankMode,
    #[serde(default = "default_weight")]
    pub weight: f64,
    pub accept_above: Option<u64>,
    /// Restrict extraction to these lemmas; empty keeps every verb.
    #[serde(default)]
    pub predicates: Vec<String>,
    pub synth: Option<SynthConfig>,
}

fn default_threshold() -> f64 {
    subcat::statfilter::DEFAULT_THRESHOLD
}
fn default_k() -> usize {
    subcat::parser::DEFAULT_K
}
fn default_workers() -> usize {
    1
}
fn default_mode() -> RerankMode {
    RerankMode::Smoothed
}
fn default_weight() -> f64 {
    1.0
}

fn de_mode<'de, D: serde::Deserializer<'de>>(d: D) -> Result<RerankMode, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub threshold: Option<f64>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub mode: Option<RerankMode>,
}

impl PipelineConfig {
    /// Read a config file; relative paths resolve against its directory.
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = Self::from_toml(&text, base)?;
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn from_toml(text: &str, base: &Path) -> CliResult<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.resolve(base);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.threshold {
            self.threshold = v;
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = o.mode {
            self.mode = v;
        }
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [&mut self.grammar, &mut self.inventory, &mut self.ruleset, &mut self.output_dir] {
            fix(p);
        }
        for p in [
            &mut self.corpus,
            &mut self.priors,
            &mut self.tagger_train,
            &mut self.tagset,
            &mut self.stats,
            &mut self.lexicon,
            &mut self.gold,
            &mut self.brackets,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        if let Some(s) = &mut self.synth {
            fix(&mut s.templates);
            fix(&mut s.seed_lexicon);
        }
    }

    fn input_files(&self) -> Vec<(&'static str, Option<&Path>)> {
        vec![
            ("corpus", self.corpus.as_deref()),
            ("grammar", Some(&self.grammar)),
            ("inventory", Some(&self.inventory)),
            ("ruleset", Some(&self.ruleset)),
            ("priors", self.priors.as_deref()),
            ("tagger_train", self.tagger_train.as_deref()),
            ("tagset", self.tagset.as_deref()),
            ("stats", self.stats.as_deref()),
            ("lexicon", self.lexicon.as_deref()),
            ("gold", self.gold.as_deref()),
            ("brackets", self.brackets.as_deref()),
            ("templates", self.synth.as_ref().map(|s| s.templates.as_path())),
            ("seed_lexicon", self.synth.as_ref().map(|s| s.seed_lexicon.as_path())),
        ]
    }

    /// Check parameters and that every configured file is readable, then
    /// that the stages have the inputs they need.
    pub fn validate(&self, stages: &[Stage], synth: bool) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !self.weight.is_finite() {
            return bad("weight must be finite".into());
        }
        for (name, path) in self.input_files() {
            // synthesis writes these rather than reading them
            if synth && matches!(name, "corpus" | "gold" | "brackets") {
                continue;
            }
            if let Some(p) = path {
                if let Err(e) = std::fs::File::open(p) {
                    return bad(format!("{name} file {} is not readable: {e}", p.display()));
                }
            }
        }
        let need = |ok: bool, what: &str, stage: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Config(format!("stage {stage} needs `{what}` in the config")))
            }
        };
        for s in stages {
            match s {
                Stage::Tag => {
                    need(self.corpus.is_some(), "corpus", "tag")?;
                    if self.corpus_format == CorpusFormat::Raw {
                        need(self.tagger_train.is_some(), "tagger_train", "tag")?;
                    }
                }
                Stage::Lexicon => need(self.priors.is_some(), "priors", "lexicon")?,
                Stage::Evaluate => need(
                    self.gold.is_some() || self.brackets.is_some(),
                    "gold or brackets",
                    "evaluate",
                )?,
                _ => {}
            }
        }
        if synth {
            need(self.synth.is_some(), "[synth]", "synth")?;
        }
        Ok(())
    }

    /// Digest of every setting and input file content that can affect
    /// artifacts. Worker count and output location are left out.
    pub fn hash(&self) -> String {
        let mut canon = String::new();
        for (name, path) in self.input_files() {
            // files a synthesis run has yet to write hash as absent
            let digest = match path.map(std::fs::read) {
                Some(Ok(bytes)) => format!("{:x}", Sha256::digest(&bytes)),
                Some(Err(_)) => "absent".into(),
                None => "-".into(),
            };
            let _ = writeln!(canon, "{name}={digest}");
        }
        let _ = writeln!(canon, "corpus_format={:?}", self.corpus_format);
        let _ = writeln!(canon, "threshold={}", self.threshold);
        let _ = writeln!(canon, "k={}", self.k);
        let _ = writeln!(canon, "seed={}", self.seed);
        let _ = writeln!(canon, "mode={:?}", self.mode);
        let _ = writeln!(canon, "weight={}", self.weight);
        let _ = writeln!(canon, "accept_above={:?}", self.accept_above);
        let _ = writeln!(canon, "predicates={}", self.predicates.join(","));
        if let Some(s) = &self.synth {
            let _ = writeln!(canon, "sentences={}", s.sentences);
        }
        let full = format!("{:x}", Sha256::digest(canon.as_bytes()));
        full[..16].to_string()
    }
}
