use std::fs;

use semascore::error::CorpusError;
use semascore::{
    cer, evaluate_corpus, load_corpus, normalize, EmbedderConfig, Error, EvalOptions, Format,
    Scorer,
};
use tempfile::TempDir;

#[test]
fn jsonl_and_tsv_load_the_same_records() {
    let dir = TempDir::new().unwrap();
    let jsonl = dir.path().join("c.jsonl");
    let tsv = dir.path().join("c.tsv");
    fs::write(
        &jsonl,
        "{\"id\":\"1\",\"gt\":\"thank you\",\"h\":\"thank thank thank\",\"group\":\"a\"}\n\n{\"id\":\"2\",\"gt\":\"hi there\",\"h\":\"hi\"}\n",
    )
    .unwrap();
    fs::write(
        &tsv,
        "1\tthank you\tthank thank thank\ta\n2\thi there\thi\n",
    )
    .unwrap();

    assert_eq!(Format::from_path(&jsonl), Format::Jsonl);
    assert_eq!(Format::from_path(&tsv), Format::Tsv);
    let a = load_corpus(&jsonl, Format::Jsonl).unwrap();
    let b = load_corpus(&tsv, Format::Tsv).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[0].group.as_deref(), Some("a"));
    assert_eq!(a[1].group, None);
}

#[test]
fn load_errors_carry_location() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.jsonl");
    match load_corpus(&missing, Format::Jsonl) {
        Err(CorpusError::Io { path, .. }) => assert_eq!(path, missing),
        other => panic!("{other:?}"),
    }

    let dup = dir.path().join("dup.tsv");
    fs::write(&dup, "x\ta\ta\nx\tb\tb\n").unwrap();
    assert!(matches!(
        load_corpus(&dup, Format::Tsv),
        Err(CorpusError::DuplicateId { line: 2, .. })
    ));

    let short = dir.path().join("short.tsv");
    fs::write(&short, "x\ta\n").unwrap();
    assert!(matches!(
        load_corpus(&short, Format::Tsv),
        Err(CorpusError::Malformed { line: 1, .. })
    ));

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "\n\n").unwrap();
    let records = load_corpus(&empty, Format::Jsonl).unwrap();
    assert!(records.is_empty());
    let scorer = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
    assert!(matches!(
        evaluate_corpus(&records, &scorer, &EvalOptions::default()),
        Err(Error::Corpus(CorpusError::Empty))
    ));
}

#[test]
fn report_cer_matches_standalone_cer() {
    let scorer = Scorer::from_config(&EmbedderConfig::mock(0)).unwrap();
    let pairs = [
        ("i want to have a sandwich", "i vant to havea sand wich"),
        ("thank you", "thank thank thank"),
        ("the quick brown fox", "quick brown the fox"),
        ("a", "b c d e"),
        ("hello world", ""),
    ];
    for (gt, h) in pairs {
        let report = scorer.score(gt, h).unwrap();
        let want = cer(normalize(gt).as_str(), normalize(h).as_str()).unwrap();
        assert_eq!(report.cer, Some(want), "{gt:?} / {h:?}");
    }
}
