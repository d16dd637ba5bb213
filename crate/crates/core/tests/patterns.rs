use subcat::ingest::{read_tagged_corpus, LemmaRuleset, TaggedToken};
use subcat::parser::{parse, Grammar, SentenceParses};
use subcat::patterns::{
    build_patternsets, classify_patternsets, detect_passive, extract, read_classified,
    read_patternsets, write_classified, write_patternsets, ClassInventory, Classification, HeadRef,
    Pattern, Slot,
};

fn grammar() -> Grammar {
    Grammar::parse(include_str!("../data/grammar.txt")).unwrap()
}

fn inventory() -> ClassInventory {
    ClassInventory::parse(include_str!("../data/inventory.txt")).unwrap()
}

fn tagged(line: &str) -> Vec<TaggedToken> {
    let rules = LemmaRuleset::parse(include_str!("../data/lemma_rules.txt")).unwrap();
    read_tagged_corpus(line)
        .remove(0)
        .iter()
        .map(|t| rules.lemmatize(t))
        .collect()
}

fn best_pattern(line: &str, predicate: usize) -> Pattern {
    let g = grammar();
    let parses = parse(&tagged(line), &g, 1);
    assert!(!parses.is_empty(), "no parse for {line}");
    extract(&parses[0], predicate, 0).unwrap().expect("pattern")
}

fn lemmas(hs: &[HeadRef]) -> Vec<&str> {
    hs.iter().map(|h| h.lemma.as_str()).collect()
}

const FIGURE: &str = "he_PPHS1 attribute_VVD his_APP$ failure_NN1 ,_, he_PPHS1 say_VVD ,_, \
                      to_II no<blank>one_PN buy_VVG his_APP$ book_NN2";

#[test]
fn figure_one_pattern() {
    let p = best_pattern(FIGURE, 1);
    assert_eq!(p.predicate.lemma, "attribute");
    assert_eq!(p.vsubcat, "NP_PP");
    assert_eq!(p.subject.as_ref().map(|s| (s.lemma.as_str(), s.index)), Some(("he", 0)));
    assert!(!p.passive);
    assert_eq!(p.slots.len(), 2);
    match &p.slots[0] {
        Slot::Head { category, head } => {
            assert_eq!(category, "N2");
            assert_eq!((head.lemma.as_str(), head.index), ("failure", 3));
        }
        other => panic!("expected object slot, got {other:?}"),
    }
    match &p.slots[1] {
        Slot::Pp(pp) => {
            assert_eq!(pp.psubcat, "SING");
            assert_eq!((pp.prep.lemma.as_str(), pp.prep.index), ("to", 8));
            assert_eq!(lemmas(&pp.complements), ["no<blank>one", "buy"]);
            assert_eq!(pp.complements[1].index, 10);
        }
        other => panic!("expected PP slot, got {other:?}"),
    }
    assert_eq!(inventory().classify(&p), Classification::Class("NP_PP-SING".into()));

    // the parenthetical verb is its own predicate instance
    let say = best_pattern(FIGURE, 6);
    assert_eq!(say.vsubcat, "NONE");
    assert_eq!(say.subject.as_ref().unwrap().index, 5);
    assert_eq!(inventory().classify(&say).to_string(), "INTRANS");
}

#[test]
fn intransitive_and_errors() {
    let g = grammar();
    let s = tagged("he_PPHS1 sleep_VVZ ._.");
    let a = &parse(&s, &g, 1)[0];
    let p = extract(a, 1, 0).unwrap().unwrap();
    assert_eq!(p.vsubcat, "NONE");
    assert!(p.slots.is_empty());
    assert_eq!(p.subject.unwrap().lemma, "he");
    // non-verbal predicate
    assert_eq!(extract(a, 0, 0).unwrap(), None);
    assert!(extract(a, 3, 0).is_err());
}

#[test]
fn adjunct_pp_excluded() {
    let g = grammar();
    let s = tagged("he_PPHS1 sleep_VVD in_II the_AT park_NN1");
    let analyses = parse(&s, &g, 10);
    // the VP-adjunct attachment is among the analyses; it contributes no slot
    let adj = analyses
        .iter()
        .filter_map(|a| extract(a, 1, 0).unwrap())
        .find(|p| p.vsubcat == "NONE")
        .expect("adjunct reading");
    assert!(adj.slots.is_empty());
    let arg = analyses
        .iter()
        .filter_map(|a| extract(a, 1, 0).unwrap())
        .find(|p| p.vsubcat == "PP")
        .expect("argument reading");
    assert_eq!(arg.slots.len(), 1);
}

#[test]
fn passive_ditransitive() {
    let g = grammar();
    let s = tagged("he_PPHS1 was_VBDZ given_VVN a_AT1 book_NN1");
    let a = &parse(&s, &g, 1)[0];
    assert!(detect_passive(a, 2).unwrap());
    let p = extract(a, 2, 0).unwrap().unwrap();
    assert!(p.passive);
    assert_eq!(p.vsubcat, "NP_NP");
    assert_eq!(p.subject, None);
    let heads: Vec<_> = p
        .slots
        .iter()
        .map(|s| match s {
            Slot::Head { head, .. } => head.index,
            Slot::Pp(_) => usize::MAX,
        })
        .collect();
    assert_eq!(heads, [0, 4]);
    assert_eq!(inventory().classify(&p).to_string(), "NP_NP");

    let active = tagged("he_PPHS1 gave_VVD a_AT1 book_NN1");
    let a = &parse(&active, &g, 1)[0];
    assert!(!detect_passive(a, 1).unwrap());
}

#[test]
fn passive_intransitive_surface() {
    let g = grammar();
    let s = tagged("the_AT door_NN1 was_VBDZ closed_VVN");
    let a = &parse(&s, &g, 1)[0];
    assert!(detect_passive(a, 3).unwrap());
    let p = extract(a, 3, 0).unwrap().unwrap();
    assert_eq!(p.vsubcat, "NP");
    assert!(matches!(&p.slots[..], [Slot::Head { head, .. }] if head.lemma == "door"));
    assert_eq!(inventory().classify(&p).to_string(), "NP");
}

#[test]
fn passive_agent_becomes_subject() {
    let g = grammar();
    let s = tagged("the_AT door_NN1 was_VBDZ closed_VVN by_II the_AT man_NN1");
    let found: Vec<Pattern> = parse(&s, &g, 10)
        .iter()
        .filter_map(|a| extract(a, 3, 0).unwrap())
        .collect();
    assert!(!found.is_empty());
    for p in &found {
        assert!(p.passive);
        assert_eq!(p.vsubcat, "NP");
        assert_eq!(p.subject.as_ref().map(|s| s.lemma.as_str()), Some("man"));
    }
}

#[test]
fn progressive_is_not_passive() {
    let g = grammar();
    let s = tagged("he_PPHS1 was_VBDZ reading_VVG a_AT1 book_NN1");
    let a = &parse(&s, &g, 1)[0];
    assert!(!detect_passive(a, 2).unwrap());
    let p = extract(a, 2, 0).unwrap().unwrap();
    assert_eq!(p.vsubcat, "NP");
    assert_eq!(p.subject.unwrap().lemma, "he");
}

#[test]
fn material_outside_the_clause_is_irrelevant() {
    let inner = best_pattern("he_PPHS1 put_VVD the_AT book_NN1 on_II the_AT table_NN1", 1);
    let outer = best_pattern(
        "she_PPHS1 say_VVD that_CST he_PPHS1 put_VVD the_AT book_NN1 on_II the_AT table_NN1",
        4,
    );
    let shift = |h: &HeadRef| (h.lemma.clone(), h.index - 3);
    assert_eq!(inner.vsubcat, outer.vsubcat);
    assert_eq!(
        inner.subject.as_ref().map(|h| (h.lemma.clone(), h.index)),
        outer.subject.as_ref().map(shift)
    );
    assert_eq!(inner.slots.len(), outer.slots.len());
    for (a, b) in inner.slots.iter().zip(&outer.slots) {
        match (a, b) {
            (Slot::Head { head: x, .. }, Slot::Head { head: y, .. }) => {
                assert_eq!((x.lemma.clone(), x.index), shift(y))
            }
            (Slot::Pp(x), Slot::Pp(y)) => {
                assert_eq!((x.prep.lemma.clone(), x.prep.index), shift(&y.prep));
                assert_eq!(x.psubcat, y.psubcat);
            }
            _ => panic!("slot kinds differ"),
        }
    }
}

#[test]
fn patternsets_group_and_round_trip() {
    let g = grammar();
    let corpus = [
        "he_PPHS1 gave_VVD him_PPHO1 a_AT1 book_NN1 ._.",
        "it_PPH1 seemed_VVD odd_JJ ._.",
        "she_PPHS1 gave_VVD a_AT1 book_NN1 to_II him_PPHO1 ._.",
        "the_AT man_NN1 seemed_VVD happy_JJ ._.",
        "he_PPHS1 gave_VVD up_RP ._.",
    ];
    let parses: Vec<SentenceParses> = corpus
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let s = tagged(l);
            SentenceParses {
                sentence: i,
                analyses: parse(&s, &g, 5),
            }
        })
        .collect();
    let grouped = build_patternsets(&parses, &[]).unwrap();
    assert_eq!(grouped.keys().collect::<Vec<_>>(), ["give", "seem"]);
    assert_eq!(grouped["give"].len(), 3);
    assert_eq!(grouped["seem"].len(), 2);
    for sets in grouped.values() {
        for ps in sets {
            assert_eq!(ps.selected_rank, 1);
            assert!(ps.candidates.iter().all(|(r, _)| *r > ps.selected_rank));
        }
    }
    let only = build_patternsets(&parses, &["seem".to_string()]).unwrap();
    assert_eq!(only.len(), 1);

    let text = write_patternsets(&grouped);
    assert_eq!(read_patternsets(&text).unwrap(), grouped);

    let classified = classify_patternsets(&grouped, &inventory());
    let give: Vec<String> = classified["give"].iter().map(|c| c.class.to_string()).collect();
    assert_eq!(give, ["NP_NP", "NP_PP-to", "PRT-up"]);
    let out = write_classified(&classified);
    assert_eq!(read_classified(&out).unwrap(), classified);
}

#[test]
fn selection_falls_to_lower_rank() {
    let g = grammar();
    // rank 1 has a noun at position 1, rank 2 a verb
    let mut first = parse(&tagged("the_AT dog_NN1 sleep_VVD"), &g, 1).remove(0);
    let mut second = parse(&tagged("he_PPHS1 sleep_VVD ._."), &g, 1).remove(0);
    first.rank = 1;
    second.rank = 2;
    let sp = SentenceParses {
        sentence: 0,
        analyses: vec![first, second],
    };
    let grouped = build_patternsets(&[sp], &[]).unwrap();
    let at1 = grouped["sleep"].iter().find(|p| p.index == 1).unwrap();
    assert_eq!(at1.selected_rank, 2);
    assert!(at1.candidates.is_empty());
    let at2 = grouped["sleep"].iter().find(|p| p.index == 2).unwrap();
    assert_eq!(at2.selected_rank, 1);
}
