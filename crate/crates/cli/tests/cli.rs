mod support;

use std::fs;

use support::*;

#[test]
fn tag_one_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("one.txt");
    fs::write(&corpus, "she_PPHS1 gave_VVD him_PPHO1 the_AT book_NN1 ._.\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &config_text(&dir.path().join("out"), &format!("corpus = {:?}\n", corpus.display().to_string())),
    );
    run_ok(&["tag", "--config", cfg.to_str().unwrap()]);
    let tagged = fs::read_to_string(dir.path().join("out/tagged.txt")).unwrap();
    assert!(tagged.contains("1\tgave\tgive\tVVD\t-"));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.contains("sentences 1"));
}

#[test]
fn lexicon_without_classify_is_a_missing_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mixed_config(dir.path(), "out", 1);
    let out = subcat(&["lexicon", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("classified.txt"), "{err}");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mixed_config(dir.path(), "out", 1);
    let c = cfg.to_str().unwrap();
    for args in [
        vec!["run", "--config", c, "--threshold", "1.5"],
        vec!["run", "--config", c, "--k", "0"],
        vec!["run", "--config", c, "--workers", "0"],
        vec!["run", "--config", c, "--stages", "tag,frob"],
        vec!["rerank", "--config", c, "--mode", "fancy"],
        vec!["tag", "--config", "/nonexistent/config.toml"],
    ] {
        let out = subcat(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let text = fs::read_to_string(&cfg).unwrap().replace("mixed_gold.txt", "no_such_gold.txt");
    let bad = write_config(dir.path(), "bad.toml", &text);
    let out = subcat(&["tag", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gold"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn stage_needs_its_inputs_configured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &config_text(&dir.path().join("out"), ""));
    let out = subcat(&["tag", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corpus"));
    let out = subcat(&["synth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mixed_corpus_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mixed_config(dir.path(), "out", 2);
    run_ok(&["run", "--config", cfg.to_str().unwrap()]);
    let out = dir.path().join("out");
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    let value = |key: &str| -> f64 {
        report
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key} ")))
            .unwrap_or_else(|| panic!("{key} missing from report"))
            .parse()
            .unwrap()
    };
    assert_eq!(value("sentences"), 20.0);
    assert!(value("coverage") < 1.0 && value("coverage") > 0.9);
    assert!(value("unclassifiable_fraction") > 0.0);
    assert!(report.contains("\ntalk\t1\t1\t0\t0\n"), "{report}");
    let eval = fs::read_to_string(out.join("evaluation.txt")).unwrap();
    assert!(eval.contains("[metrics]"));
    let lex = fs::read_to_string(out.join("lexicon.txt")).unwrap();
    assert!(lex.starts_with("# corpus=mixed_corpus.txt config="));
    // passive remapping: "the door was closed" counts as transitive
    assert!(lex.contains("VERB close 1\nNP 1 "), "{lex}");
    // nothing but artifacts in the output directory
    for name in snapshot(&out).keys() {
        assert!(name.ends_with(".txt"), "stray file {name}");
    }
}

#[test]
fn stages_compose() {
    let dir = tempfile::tempdir().unwrap();
    let whole = mixed_config(dir.path(), "whole", 1);
    let split = mixed_config(dir.path(), "split", 1);
    run_ok(&["run", "--config", whole.to_str().unwrap(), "--stages", "tag,parse,extract,classify,lexicon,evaluate"]);
    for stage in ["tag", "parse", "extract", "classify", "lexicon", "evaluate"] {
        run_ok(&[stage, "--config", split.to_str().unwrap()]);
    }
    assert_eq!(snapshot(&dir.path().join("whole")), snapshot(&dir.path().join("split")));
}

#[test]
fn overrides_reach_the_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mixed_config(dir.path(), "out", 1);
    let c = cfg.to_str().unwrap();
    run_ok(&["run", "--config", c, "--stages", "tag,parse,extract,classify,lexicon"]);
    let lex = |d: &std::path::Path| fs::read_to_string(d.join("lexicon.txt")).unwrap();
    let default = lex(&dir.path().join("out"));
    run_ok(&["lexicon", "--config", c, "--threshold", "0.2"]);
    let loose = lex(&dir.path().join("out"));
    assert_ne!(default.lines().next(), loose.lines().next(), "config hash must change");
    let accepted = |t: &str| t.lines().filter(|l| l.contains(" yes ")).count();
    assert!(accepted(&loose) > accepted(&default));
}

#[test]
fn rerank_modes_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let train = synth_config(dir.path(), "train", "templates.txt", "rerank_train_seed.txt", 200, 3, "");
    run_ok(&["synth", "--config", train.to_str().unwrap()]);
    run_ok(&["run", "--config", train.to_str().unwrap(), "--stages", "tag,parse,extract,classify,lexicon"]);
    let lexicon = dir.path().join("train/lexicon.txt");
    let test = synth_config(
        dir.path(),
        "test",
        "ambiguity_templates.txt",
        "ambiguity_seed.txt",
        40,
        5,
        &format!("lexicon = {:?}\n", lexicon.display().to_string()),
    );
    let t = test.to_str().unwrap();
    run_ok(&["synth", "--config", t]);
    run_ok(&["run", "--config", t, "--stages", "tag,parse,rerank"]);
    let ledger = fs::read_to_string(dir.path().join("test/rerank_ledger.txt")).unwrap();
    for line in ledger.lines() {
        let f: Vec<&str> = line.split('\t').collect();
        let (base, adj, comb): (f64, f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap());
        assert!((base + adj - comb).abs() < 1e-6, "{line}");
        assert!(comb.is_finite());
    }
    run_ok(&["rerank", "--config", t, "--mode", "raw"]);
    let raw = fs::read_to_string(dir.path().join("test/rerank_ledger.txt")).unwrap();
    assert_ne!(ledger, raw);
    // raw counts only ever add to the base score
    for line in raw.lines() {
        let adj: f64 = line.split('\t').nth(4).unwrap().parse().unwrap();
        assert!(adj >= 0.0);
    }
}
