use plab_core::experiments::corpus::{gen_corpus, CorpusManifest};
use plab_core::experiments::report::{collect_manifests, emit_report, Predicate, SuiteReport};
use plab_core::experiments::ExperimentConfig;

#[test]
fn empty_report_writes_header_only_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let rep = SuiteReport::new("empty", 3, &["a", "b"]);
    let paths = emit_report(&rep, dir).unwrap();
    assert_eq!(paths.len(), 3);
    assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), "a,b\n");
    let m = collect_manifests(dir).unwrap();
    assert_eq!(m.len(), 1);
    assert!(m[0].pass, "no predicates means vacuous pass");
}

#[test]
fn manifest_records_each_predicate() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut rep = SuiteReport::new("mixed", 7, &["x"]);
    rep.row(vec!["1".into()]);
    rep.check(Predicate::at_most("small", 0.5, 1.0));
    rep.check(Predicate::at_most("nan", f64::NAN, 1.0));
    emit_report(&rep, dir).unwrap();
    let m = &collect_manifests(dir).unwrap()[0];
    assert!(!m.pass);
    assert_eq!(m.predicates, vec![("small".to_string(), true), ("nan".to_string(), false)]);
    let back: SuiteReport = serde_json::from_str(&std::fs::read_to_string(dir.join("mixed.json")).unwrap()).unwrap();
    assert_eq!(back.rows, rep.rows);
    assert_eq!(back.seed, 7);
    assert!(back.predicates[1].value.is_nan());
}

#[test]
fn corpus_manifest_round_trips() {
    let cfg = ExperimentConfig::for_suite("gen-corpus");
    let corpus = gen_corpus(&cfg, 16).unwrap();
    let text = serde_json::to_string(&corpus.manifest).unwrap();
    let back: CorpusManifest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, corpus.manifest);
}

