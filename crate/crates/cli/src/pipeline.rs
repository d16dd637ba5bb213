//! Stage execution over file artifacts in the output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use subcat::eval::{
    evaluate_lexicon, gen_synth_corpus, geig, gold_analysis, paired_t, parse_seed_lexicon, read_bracketings,
    read_gold, write_bracketings, write_gold, Bracketing, EvalReport, Geig, Templates,
};
use subcat::ingest::{
    read_raw_corpus, read_sentences, read_tagged_corpus, tag_sentence, write_sentences, LemmaRuleset, Sentence,
    TaggerConfig, TaggerModel, Tagset,
};
use subcat::parser::{parse, read_parses, write_parses, Grammar, SentenceParses};
use subcat::patterns::{
    build_patternsets, classify_patternsets, read_classified, read_patternsets, write_classified,
    write_patternsets, ClassInventory, ClassifiedGroups,
};
use subcat::rerank::{rerank, write_ledger, RerankOptions};
use subcat::statfilter::{build_lexicon, FilterOptions, Lexicon, PatternStats, Priors, Provenance};

use crate::config::{CorpusFormat, PipelineConfig};
use crate::error::{CliError, CliResult};
use crate::stage::Stage;

pub const TAGGED: &str = "tagged.txt";
pub const PARSES: &str = "parses.txt";
pub const PATTERNSETS: &str = "patternsets.txt";
pub const CLASSIFIED: &str = "classified.txt";
pub const STATS: &str = "stats.txt";
pub const LEXICON: &str = "lexicon.txt";
pub const RERANKED: &str = "reranked.txt";
pub const LEDGER: &str = "rerank_ledger.txt";
pub const EVALUATION: &str = "evaluation.txt";
pub const REPORT: &str = "report.txt";
pub const SYNTH_CORPUS: &str = "synth_corpus.txt";
pub const SYNTH_GOLD: &str = "synth_gold.txt";
pub const SYNTH_LABELS: &str = "synth_labels.txt";
pub const SYNTH_BRACKETS: &str = "synth_brackets.txt";

/// Replace `path` in one step so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Loaded resources plus the thread pool for one run.
pub struct Pipeline<'a> {
    cfg: &'a PipelineConfig,
    grammar: Grammar,
    inventory: ClassInventory,
    rules: LemmaRuleset,
    pool: rayon::ThreadPool,
    hash: String,
}

impl<'a> Pipeline<'a> {
    pub fn new(cfg: &'a PipelineConfig) -> CliResult<Self> {
        let load = |p: &Path| read_input(p).map_err(|e| CliError::Config(e.to_string()));
        let grammar = Grammar::parse(&load(&cfg.grammar)?).map_err(|e| CliError::Config(format!("grammar: {e}")))?;
        let inventory =
            ClassInventory::parse(&load(&cfg.inventory)?).map_err(|e| CliError::Config(format!("inventory: {e}")))?;
        inventory
            .validate_against(&grammar)
            .map_err(|e| CliError::Config(format!("inventory: {e}")))?;
        let rules = LemmaRuleset::parse(&load(&cfg.ruleset)?).map_err(|e| CliError::Config(format!("ruleset: {e}")))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        Ok(Pipeline {
            cfg,
            grammar,
            inventory,
            rules,
            pool,
            hash: cfg.hash(),
        })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn artifact(&self, name: &str, stage: &'static str) -> CliResult<String> {
        let path = self.out(name);
        if !path.exists() {
            return Err(CliError::MissingArtifact { path, stage });
        }
        read_input(&path)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        write_atomic(&self.out(name), contents)
    }

    /// Run the stages in pipeline order, then refresh the run report.
    pub fn run(&self, stages: &[Stage]) -> CliResult<()> {
        let mut stages = stages.to_vec();
        stages.sort();
        stages.dedup();
        for s in stages {
            match s {
                Stage::Tag => self.tag()?,
                Stage::Parse => self.parse()?,
                Stage::Extract => self.extract()?,
                Stage::Classify => self.classify()?,
                Stage::Lexicon => self.lexicon()?,
                Stage::Rerank => self.rerank()?,
                Stage::Evaluate => self.evaluate()?,
            }
        }
        self.write(REPORT, &self.report()?)
    }

    fn tag(&self) -> CliResult<()> {
        let corpus = self.cfg.corpus.as_ref().expect("validated");
        let text = read_input(corpus)?;
        let sentences: Vec<Sentence> = match self.cfg.corpus_format {
            CorpusFormat::Tagged => {
                let raw = read_tagged_corpus(&text);
                for (si, s) in raw.iter().enumerate() {
                    if let Some(ti) = s.iter().position(|t| t.tag.is_empty()) {
                        return Err(CliError::Core {
                            context: corpus.display().to_string(),
                            source: subcat::Error::EmptyTag { sentence: si, token: ti },
                        });
                    }
                }
                self.pool.install(|| {
                    raw.par_iter()
                        .map(|s| s.iter().map(|t| self.rules.lemmatize(t)).collect())
                        .collect()
                })
            }
            CorpusFormat::Raw => {
                let model = self.tagger()?;
                let words = read_raw_corpus(&text);
                self.pool
                    .install(|| words.par_iter().map(|w| tag_sentence(w, &model, &self.rules)).collect())
            }
        };
        self.write(TAGGED, &write_sentences(&sentences))
    }

    fn tagger(&self) -> CliResult<TaggerModel> {
        let train_path = self.cfg.tagger_train.as_ref().expect("validated");
        let train = read_tagged_corpus(&read_input(train_path)?);
        let mut config = TaggerConfig::default();
        if let Some(p) = &self.cfg.tagset {
            let ts = Tagset::parse(&read_input(p)?).map_err(|e| CliError::Config(format!("tagset: {e}")))?;
            config.open_tags = ts.open;
        }
        TaggerModel::train(&train, config).map_err(CliError::core("tagger training"))
    }

    fn parse(&self) -> CliResult<()> {
        let sentences = read_sentences(&self.artifact(TAGGED, "tag")?).map_err(CliError::core(TAGGED))?;
        let parses: Vec<SentenceParses> = self.pool.install(|| {
            sentences
                .par_iter()
                .enumerate()
                .map(|(i, s)| SentenceParses {
                    sentence: i,
                    analyses: parse(s, &self.grammar, self.cfg.k),
                })
                .collect()
        });
        self.write(PARSES, &write_parses(&parses))
    }

    fn read_parses(&self, name: &str, stage: &'static str) -> CliResult<Vec<SentenceParses>> {
        read_parses(&self.artifact(name, stage)?, &self.grammar).map_err(CliError::core(name.to_string()))
    }

    fn extract(&self) -> CliResult<()> {
        let parses = self.read_parses(PARSES, "parse")?;
        let grouped = build_patternsets(&parses, &self.cfg.predicates).map_err(CliError::core("extract"))?;
        self.write(PATTERNSETS, &write_patternsets(&grouped))
    }

    fn classify(&self) -> CliResult<()> {
        let grouped = read_patternsets(&self.artifact(PATTERNSETS, "extract")?).map_err(CliError::core(PATTERNSETS))?;
        let classified = classify_patternsets(&grouped, &self.inventory);
        let stats = PatternStats::from_classified(&classified, &self.inventory).map_err(CliError::core("classify"))?;
        self.write(CLASSIFIED, &write_classified(&classified))?;
        self.write(STATS, &stats.to_text())
    }

    fn read_classified(&self) -> CliResult<ClassifiedGroups> {
        read_classified(&self.artifact(CLASSIFIED, "classify")?).map_err(CliError::core(CLASSIFIED))
    }

    fn lexicon(&self) -> CliResult<()> {
        let classified = self.read_classified()?;
        let priors_path = self.cfg.priors.as_ref().expect("validated");
        let priors = Priors::parse(&read_input(priors_path)?).map_err(|e| CliError::Config(format!("priors: {e}")))?;
        priors
            .check_covers(&self.inventory)
            .map_err(|e| CliError::Config(format!("priors: {e}")))?;
        let stats_text = match &self.cfg.stats {
            Some(p) => read_input(p)?,
            None => self.artifact(STATS, "classify")?,
        };
        let stats = PatternStats::parse(&stats_text).map_err(CliError::core("pattern statistics"))?;
        let options = FilterOptions {
            threshold: self.cfg.threshold,
            accept_above: self.cfg.accept_above,
        };
        let mut lex =
            build_lexicon(&classified, &self.inventory, &priors, &stats, &options).map_err(CliError::core("lexicon"))?;
        lex.provenance = Provenance {
            corpus: self
                .cfg
                .corpus
                .as_ref()
                .and_then(|p| p.file_name())
                .map_or_else(|| "-".into(), |n| n.to_string_lossy().into_owned()),
            config_hash: self.hash.clone(),
        };
        self.write(LEXICON, &lex.to_text())
    }

    fn load_lexicon(&self) -> CliResult<Lexicon> {
        let text = match &self.cfg.lexicon {
            Some(p) => read_input(p)?,
            None => self.artifact(LEXICON, "lexicon")?,
        };
        Lexicon::parse(&text).map_err(CliError::core("lexicon"))
    }

    fn rerank(&self) -> CliResult<()> {
        let parses = self.read_parses(PARSES, "parse")?;
        let lexicon = self.load_lexicon()?;
        let options = RerankOptions {
            mode: self.cfg.mode,
            weight: self.cfg.weight,
        };
        let results: Vec<(SentenceParses, String)> = self.pool.install(|| {
            parses
                .par_iter()
                .map(|sp| {
                    let scored = rerank(&sp.analyses, sp.sentence, &lexicon, &self.inventory, &options)
                        .map_err(CliError::core(format!("rerank sentence {}", sp.sentence)))?;
                    let ledger = write_ledger(sp.sentence, &scored);
                    let analyses = scored
                        .into_iter()
                        .enumerate()
                        .map(|(i, (mut a, _))| {
                            a.rank = i + 1;
                            a
                        })
                        .collect();
                    Ok((
                        SentenceParses {
                            sentence: sp.sentence,
                            analyses,
                        },
                        ledger,
                    ))
                })
                .collect::<CliResult<_>>()
        })?;
        let ledger: String = results.iter().map(|(_, l)| l.as_str()).collect();
        let reranked: Vec<SentenceParses> = results.into_iter().map(|(p, _)| p).collect();
        self.write(RERANKED, &write_parses(&reranked))?;
        self.write(LEDGER, &ledger)
    }

    fn evaluate(&self) -> CliResult<()> {
        let mut report = EvalReport::default();
        if let Some(gold_path) = &self.cfg.gold {
            let gold = read_gold(&read_input(gold_path)?).map_err(CliError::core("gold"))?;
            let lexicon = Lexicon::parse(&self.artifact(LEXICON, "lexicon")?).map_err(CliError::core(LEXICON))?;
            report = evaluate_lexicon(&lexicon, &gold);
        }
        if let Some(br_path) = &self.cfg.brackets {
            let gold = read_bracketings(&read_input(br_path)?).map_err(CliError::core("brackets"))?;
            let baseline = self.read_parses(PARSES, "parse")?;
            let reranked = if self.out(RERANKED).exists() {
                Some(self.read_parses(RERANKED, "rerank")?)
            } else {
                None
            };
            let (base_g, base_x) = bracket_scores(&baseline, &gold)?;
            report.baseline = Some(base_g);
            if let Some(r) = reranked {
                let (rr_g, rr_x) = bracket_scores(&r, &gold)?;
                report.reranked = Some(rr_g);
                if base_x.len() >= 2 {
                    report.ttest = paired_t(&base_x, &rr_x).ok();
                }
            }
        }
        self.write(EVALUATION, &report.to_text())
    }

    fn report(&self) -> CliResult<String> {
        let mut out = String::new();
        let _ = writeln!(out, "config {}", self.hash);
        let read = |name: &str| {
            let p = self.out(name);
            p.exists().then(|| read_input(&p)).transpose()
        };
        if let Some(t) = read(TAGGED)? {
            let n = read_sentences(&t).map_err(CliError::core(TAGGED))?.len();
            let _ = writeln!(out, "sentences {n}");
        }
        if let Some(t) = read(PARSES)? {
            let parses = read_parses(&t, &self.grammar).map_err(CliError::core(PARSES))?;
            let parsed = parses.iter().filter(|p| !p.analyses.is_empty()).count();
            let _ = writeln!(out, "parsed {parsed}");
            let _ = writeln!(out, "out_of_coverage {}", parses.len() - parsed);
            if !parses.is_empty() {
                let _ = writeln!(out, "coverage {:.6}", parsed as f64 / parses.len() as f64);
            }
        }
        if let Some(t) = read(CLASSIFIED)? {
            let groups = read_classified(&t).map_err(CliError::core(CLASSIFIED))?;
            let lexicon = read(LEXICON)?
                .map(|t| Lexicon::parse(&t).map_err(CliError::core(LEXICON)))
                .transpose()?;
            let total: usize = groups.values().map(Vec::len).sum();
            let unclass: usize = groups
                .values()
                .flatten()
                .filter(|i| i.class.class_id().is_none())
                .count();
            let _ = writeln!(out, "patternsets {total}");
            let _ = writeln!(out, "unclassifiable {unclass}");
            if total > 0 {
                let _ = writeln!(out, "unclassifiable_fraction {:.6}", unclass as f64 / total as f64);
            }
            let _ = writeln!(out, "verbs {}", groups.len());
            let _ = writeln!(out, "\nverb\tpatternsets\tunclassifiable\tclasses\taccepted");
            for (verb, insts) in &groups {
                let un = insts.iter().filter(|i| i.class.class_id().is_none()).count();
                let classes: BTreeMap<&str, ()> = insts.iter().filter_map(|i| i.class.class_id()).map(|c| (c, ())).collect();
                let accepted = lexicon
                    .as_ref()
                    .and_then(|l| l.get(verb))
                    .map_or_else(|| "-".to_string(), |e| e.accepted().count().to_string());
                let _ = writeln!(out, "{verb}\t{}\t{un}\t{}\t{accepted}", insts.len(), classes.len());
            }
        }
        Ok(out)
    }

    /// Generate a labelled synthetic corpus with gold entries and gold trees.
    pub fn synth(&self) -> CliResult<()> {
        let sc = self.cfg.synth.as_ref().expect("validated");
        let templates =
            Templates::parse(&read_input(&sc.templates)?).map_err(|e| CliError::Config(format!("templates: {e}")))?;
        let seed = parse_seed_lexicon(&read_input(&sc.seed_lexicon)?)
            .map_err(|e| CliError::Config(format!("seed lexicon: {e}")))?;
        let corpus = gen_synth_corpus(&seed, &templates, &self.grammar, self.cfg.seed, sc.sentences)
            .map_err(CliError::core("synth"))?;
        let brackets: Vec<Option<Bracketing>> = self.pool.install(|| {
            corpus
                .labels
                .par_iter()
                .map(|label| {
                    let s: Sentence = corpus.sentences[label.sentence]
                        .iter()
                        .map(|t| self.rules.lemmatize(t))
                        .collect();
                    let analyses = parse(&s, &self.grammar, self.cfg.k);
                    let gold = gold_analysis(&analyses, label, &self.inventory).map_err(CliError::core("synth"))?;
                    Ok(gold.map(|a| Bracketing::from_analysis(label.sentence, a)))
                })
                .collect::<CliResult<_>>()
        })?;
        let brackets: Vec<Bracketing> = brackets.into_iter().flatten().collect();
        self.write(SYNTH_CORPUS, &corpus.tagged_text())?;
        self.write(SYNTH_GOLD, &write_gold(&corpus.gold()))?;
        self.write(SYNTH_LABELS, &corpus.labels_text())?;
        self.write(SYNTH_BRACKETS, &write_bracketings(&brackets))
    }
}

/// Summed GEIG of each sentence's top analysis against the gold spans, and
/// the per-sentence crossing counts. Sentences without an analysis are skipped.
fn bracket_scores(parses: &[SentenceParses], gold: &BTreeMap<usize, Vec<(usize, usize)>>) -> CliResult<(Geig, Vec<f64>)> {
    let by_id: BTreeMap<usize, &SentenceParses> = parses.iter().map(|p| (p.sentence, p)).collect();
    let mut total = Geig::default();
    let mut crossings = Vec::new();
    for (id, spans) in gold {
        let Some(top) = by_id.get(id).and_then(|p| p.analyses.first()) else {
            continue;
        };
        let cand = Bracketing::from_analysis(*id, top);
        let g = Bracketing::new(*id, top.len(), spans.iter().copied()).map_err(CliError::core("brackets"))?;
        let s = geig(&cand, &g).map_err(CliError::core("brackets"))?;
        crossings.push(s.crossings as f64);
        total += s;
    }
    Ok((total, crossings))
}
