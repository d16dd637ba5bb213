#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").canonicalize().unwrap()
}

pub fn data(name: &str) -> String {
    data_dir().join(name).display().to_string()
}

/// A config with the shipped grammar, inventory, ruleset and priors plus `extra` lines.
pub fn config_text(output: &Path, extra: &str) -> String {
    format!(
        "grammar = {:?}\ninventory = {:?}\nruleset = {:?}\npriors = {:?}\noutput_dir = {:?}\n{extra}",
        data("grammar.txt"),
        data("inventory.txt"),
        data("lemma_rules.txt"),
        data("priors.txt"),
        output.display().to_string(),
    )
}

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn subcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subcat")).args(args).output().unwrap()
}

pub fn run_ok(args: &[&str]) {
    let out = subcat(args);
    assert!(
        out.status.success(),
        "subcat {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Every file in a directory, by name.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

/// Config for the mixed raw-text fixture.
pub fn mixed_config(dir: &Path, out: &str, workers: usize) -> PathBuf {
    let extra = format!(
        "corpus = {:?}\ncorpus_format = \"raw\"\ntagger_train = {:?}\ntagset = {:?}\ngold = {:?}\nworkers = {workers}\n",
        data("mixed_corpus.txt"),
        data("tagger_train.txt"),
        data("tagset.txt"),
        data("mixed_gold.txt"),
    );
    write_config(dir, &format!("{out}.toml"), &config_text(&dir.join(out), &extra))
}

/// Config that synthesizes into `dir/out` and then reads its own output.
pub fn synth_config(dir: &Path, out: &str, templates: &str, seed_lexicon: &str, n: usize, seed: u64, extra: &str) -> PathBuf {
    let o = dir.join(out);
    let text = format!(
        "corpus = {:?}\nseed = {seed}\n{extra}\n[synth]\ntemplates = {:?}\nseed_lexicon = {:?}\nsentences = {n}\n",
        o.join("synth_corpus.txt").display().to_string(),
        data(templates),
        data(seed_lexicon),
    );
    write_config(dir, &format!("{out}.toml"), &config_text(&o, &text))
}
